#include "size_lens/adclus.hpp"
#include "size_lens/bayesgen.hpp"
#include "size_lens/cli.hpp"
#include "size_lens/error.hpp"
#include "size_lens/ingest.hpp"
#include "size_lens/matrices.hpp"
#include "size_lens/nnls.hpp"
#include "size_lens/report.hpp"
#include "size_lens/sizelaw.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace size_lens;

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Additive-clustering weights and size-principle statistics";

  static py::exception<Error> size_lens_error(m, "SizeLensError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(size_lens_error)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(size_lens_error.ptr(), exc.ptr());
    }
  });

  // matrices
  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def(py::init<std::vector<std::string>, std::vector<std::string>, Eigen::MatrixXd>(), py::arg("object_names"),
           py::arg("feature_names"), py::arg("cells"))
      .def_property_readonly("object_names", &FeatureMatrix::object_names)
      .def_property_readonly("feature_names", &FeatureMatrix::feature_names)
      .def_property_readonly("cells", &FeatureMatrix::cells)
      .def("feature_sizes", &FeatureMatrix::feature_sizes);

  py::class_<SimilarityMatrix>(m, "SimilarityMatrix")
      .def(py::init<std::vector<std::string>, Eigen::MatrixXd>(), py::arg("object_names"), py::arg("cells"))
      .def_property_readonly("object_names", &SimilarityMatrix::object_names)
      .def_property_readonly("cells", &SimilarityMatrix::cells);

  m.def(
      "validate_similarity_matrix",
      [](std::vector<std::string> labels, Eigen::MatrixXd cells, std::optional<double> tolerance) {
        return validate_similarity_matrix(LabeledGrid{labels, {}, std::move(cells)}, tolerance);
      },
      py::arg("object_names"), py::arg("cells"), py::arg("symmetry_tolerance") = py::none());
  m.def(
      "upper_triangle_pairs",
      [](Eigen::Index n) {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
        for (const auto& p : upper_triangle_pairs(n)) out.emplace_back(p.i, p.j);
        return out;
      },
      py::arg("n"));
  m.def("min_max_normalized", &min_max_normalized);

  // nnls
  py::enum_<NnlsStatus>(m, "NnlsStatus")
      .value("Converged", NnlsStatus::Converged)
      .value("IterationLimitExceeded", NnlsStatus::IterationLimitExceeded);
  py::class_<NnlsSolution>(m, "NnlsSolution")
      .def_readonly("weights", &NnlsSolution::weights)
      .def_readonly("residual_norm", &NnlsSolution::residual_norm)
      .def_readonly("iterations", &NnlsSolution::iterations)
      .def_readonly("active_set", &NnlsSolution::active_set)
      .def_readonly("status", &NnlsSolution::status)
      .def_readonly("kkt_tolerance", &NnlsSolution::kkt_tolerance)
      .def_readonly("warnings", &NnlsSolution::warnings)
      .def_property_readonly("converged", &NnlsSolution::converged);
  m.def(
      "solve_nnls",
      [](Eigen::MatrixXd design, Eigen::VectorXd target, std::optional<double> kkt_tolerance,
         std::optional<std::size_t> max_iterations, std::vector<Eigen::Index> warm_start) {
        NnlsOptions options{kkt_tolerance, max_iterations, std::move(warm_start)};
        return solve_nnls(NnlsProblem{std::move(design), std::move(target)}, options);
      },
      py::arg("design"), py::arg("target"), py::arg("kkt_tolerance") = py::none(),
      py::arg("max_iterations") = py::none(), py::arg("warm_start") = std::vector<Eigen::Index>{});
  m.def(
      "kkt_residual",
      [](Eigen::MatrixXd design, Eigen::VectorXd target, const Eigen::VectorXd& weights) {
        return kkt_residual(NnlsProblem{std::move(design), std::move(target)}, weights);
      },
      py::arg("design"), py::arg("target"), py::arg("weights"));

  // additive clustering
  py::class_<WeightSolution>(m, "WeightSolution")
      .def_readonly("feature_names", &WeightSolution::feature_names)
      .def_readonly("weights", &WeightSolution::weights)
      .def_readonly("nonzero_feature_indices", &WeightSolution::nonzero_feature_indices)
      .def_readonly("feature_sizes", &WeightSolution::feature_sizes)
      .def_readonly("r_squared", &WeightSolution::r_squared)
      .def_readonly("fr_nonzero", &WeightSolution::fr_nonzero)
      .def_readonly("fr_total", &WeightSolution::fr_total)
      .def_readonly("intercept", &WeightSolution::intercept)
      .def_readonly("residual_norm", &WeightSolution::residual_norm)
      .def_readonly("iterations", &WeightSolution::iterations)
      .def_readonly("warnings", &WeightSolution::warnings);
  m.def(
      "build_design",
      [](const FeatureMatrix& f) {
        DesignMatrix d = build_design(f);
        std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
        for (const auto& p : d.pairs) pairs.emplace_back(p.i, p.j);
        return py::make_tuple(d.cells, pairs);
      },
      py::arg("features"));
  m.def(
      "fit",
      [](const FeatureMatrix& f, const SimilarityMatrix& s, bool intercept, std::optional<double> kkt_tolerance,
         std::optional<std::size_t> max_iterations) {
        FitOptions options;
        options.intercept = intercept;
        options.solver.kkt_tolerance = kkt_tolerance;
        options.solver.max_iterations = max_iterations;
        return fit(f, s, options);
      },
      py::arg("features"), py::arg("similarity"), py::arg("intercept") = false,
      py::arg("kkt_tolerance") = py::none(), py::arg("max_iterations") = py::none());
  m.def("predict", &predict, py::arg("features"), py::arg("weights"));
  m.def("r_squared", &r_squared, py::arg("predicted"), py::arg("observed"));

  // size law
  py::class_<SizeLawPoint>(m, "SizeLawPoint")
      .def_readonly("feature_name", &SizeLawPoint::feature_name)
      .def_readonly("weight", &SizeLawPoint::weight)
      .def_readonly("size", &SizeLawPoint::size)
      .def_readonly("log_weight", &SizeLawPoint::log_weight)
      .def_readonly("log_size", &SizeLawPoint::log_size)
      .def_readonly("z_log_weight", &SizeLawPoint::z_log_weight)
      .def_readonly("z_log_size", &SizeLawPoint::z_log_size);
  py::class_<SizeLawStats>(m, "SizeLawStats")
      .def_readonly("pearson", &SizeLawStats::pearson)
      .def_readonly("spearman", &SizeLawStats::spearman)
      .def_readonly("slope", &SizeLawStats::slope)
      .def_readonly("intercept", &SizeLawStats::intercept)
      .def_readonly("n_points", &SizeLawStats::n_points)
      .def_readonly("pearson_p_value", &SizeLawStats::pearson_p_value)
      .def_readonly("spearman_p_value", &SizeLawStats::spearman_p_value);
  py::class_<TTestResult>(m, "TTestResult")
      .def_readonly("t_statistic", &TTestResult::t_statistic)
      .def_readonly("degrees_of_freedom", &TTestResult::degrees_of_freedom)
      .def_readonly("p_value_one_sided", &TTestResult::p_value_one_sided)
      .def_readonly("mean", &TTestResult::mean)
      .def_readonly("sample_sd", &TTestResult::sample_sd);
  m.def("extract_points", &extract_points, py::arg("solution"));
  m.def("analyze", &analyze, py::arg("solution"));
  m.def("z_scores", [](std::vector<double> v) { return z_scores(v); }, py::arg("values"));
  m.def("pearson", [](std::vector<double> x, std::vector<double> y) { return pearson(x, y); }, py::arg("x"),
        py::arg("y"));
  m.def("spearman", [](std::vector<double> x, std::vector<double> y) { return spearman(x, y); }, py::arg("x"),
        py::arg("y"));
  m.def(
      "fit_line",
      [](std::vector<double> x, std::vector<double> y) {
        const LineFit line = fit_line(x, y);
        return py::make_tuple(line.slope, line.intercept);
      },
      py::arg("x"), py::arg("y"));
  m.def("one_sample_ttest_negative", [](std::vector<double> v) { return one_sample_ttest_negative(v); },
        py::arg("values"));

  // generalization model
  py::enum_<SamplingMode>(m, "SamplingMode")
      .value("Strong", SamplingMode::Strong)
      .value("Weak", SamplingMode::Weak);
  py::class_<HypothesisSpace>(m, "HypothesisSpace")
      .def(py::init([](std::vector<std::string> objects, const std::vector<std::vector<std::size_t>>& hypotheses,
                       std::optional<Eigen::VectorXd> priors, SamplingMode mode) {
             std::vector<Hypothesis> hs;
             for (const auto& h : hypotheses) hs.emplace_back(h);
             if (priors) return HypothesisSpace(std::move(objects), std::move(hs), *priors, mode);
             return HypothesisSpace::uniform(std::move(objects), std::move(hs), mode);
           }),
           py::arg("object_names"), py::arg("hypotheses"), py::arg("priors") = py::none(),
           py::arg("mode") = SamplingMode::Strong)
      .def_static("from_features", &HypothesisSpace::from_features, py::arg("features"),
                  py::arg("mode") = SamplingMode::Strong)
      .def_property_readonly("object_names", &HypothesisSpace::object_names)
      .def_property_readonly("priors", &HypothesisSpace::priors)
      .def("index_of", &HypothesisSpace::index_of);
  m.def("shepard_similarity", &shepard_similarity, py::arg("distance"));
  m.def(
      "posterior",
      [](const HypothesisSpace& space, std::vector<std::size_t> examples) {
        return as_vector(posterior(space, examples).probabilities);
      },
      py::arg("space"), py::arg("examples"));
  m.def(
      "generalize",
      [](const HypothesisSpace& space, std::vector<std::size_t> examples, std::size_t target) {
        return generalize(space, examples, target);
      },
      py::arg("space"), py::arg("examples"), py::arg("target"));
  m.def("generalization_matrix", &generalization_matrix, py::arg("space"), py::arg("n_examples") = 1);

  py::enum_<WeightLaw>(m, "WeightLaw")
      .value("InverseSize", WeightLaw::InverseSize)
      .value("InverseSizeSquared", WeightLaw::InverseSizeSquared)
      .value("Uniform", WeightLaw::Uniform);
  m.def(
      "plant_dataset",
      [](std::size_t n_objects, std::size_t n_features, WeightLaw law, double noise_sd, std::uint64_t seed) {
        PlantedDataset d = plant_dataset(n_objects, n_features, law, noise_sd, seed);
        return py::make_tuple(d.features, d.similarity, d.weights);
      },
      py::arg("n_objects"), py::arg("n_features"), py::arg("law") = WeightLaw::InverseSize,
      py::arg("noise_sd") = 0.0, py::arg("seed") = 0);

  // files
  m.def("read_feature_csv", &read_feature_csv, py::arg("path"));
  m.def("read_similarity_csv", &read_similarity_csv, py::arg("path"), py::arg("symmetry_tolerance") = py::none());
  m.def("filter_features", &filter_features, py::arg("features"), py::arg("min_size"), py::arg("max_size"));
  m.def(
      "align_objects",
      [](const SimilarityMatrix& s, const FeatureMatrix& f, const std::string& policy) {
        DatasetBundle b = align_objects(s, f, policy == "intersect" ? AlignPolicy::Intersect : AlignPolicy::Strict);
        return py::make_tuple(b.features, b.similarity, b.provenance.dropped_similarity_objects,
                              b.provenance.dropped_feature_objects);
      },
      py::arg("similarity"), py::arg("features"), py::arg("policy") = "strict");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
