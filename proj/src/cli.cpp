#include "size_lens/cli.hpp"

#include "size_lens/adclus.hpp"
#include "size_lens/bayesgen.hpp"
#include "size_lens/csv.hpp"
#include "size_lens/ingest.hpp"
#include "size_lens/report.hpp"
#include "size_lens/sizelaw.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

namespace size_lens::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Ingest: return kIngest;
    case ErrorKind::Solver: return kSolver;
    case ErrorKind::Statistics: return kStatistics;
    case ErrorKind::Io: return kIo;
    case ErrorKind::Usage: return kUsage;
  }
  return kUsage;
}

namespace {

struct AnalyzeConfig {
  std::vector<std::string> features;
  std::vector<std::string> similarities;
  std::vector<std::string> names;
  std::optional<std::size_t> min_feature_size;
  std::optional<std::size_t> max_feature_size;
  std::string align = "strict";
  bool normalize_similarity = false;
  std::optional<double> symmetry_tolerance;
  std::optional<double> kkt_tolerance;
  std::optional<std::size_t> max_iterations;
  std::string out_dir;
};

struct SimulateConfig {
  std::size_t objects = 12;
  std::size_t n_features = 8;
  std::string law = "inverse-size";
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  bool from_generalization = false;
  std::size_t n_examples = 1;
  std::string out_dir;
};

struct ReportConfig {
  std::vector<std::string> tables;
  std::string out_dir;
};

void report_error(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << '\n';
}

void prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "'");
  }
  // Fail early on a read-only directory rather than after the analysis.
  const fs::path probe = fs::path(dir) / ".size-lens-write-probe";
  csv::write_file(probe.string(), "");
  fs::remove(probe, ec);
}

std::string slug(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out.push_back(std::isalnum(c) || c == '-' || c == '.' ? static_cast<char>(c) : '_');
  if (out.empty() || out == "." || out == "..") out = "dataset";
  return out;
}

std::size_t worker_limit() {
  if (const char* env = std::getenv("SIZE_LENS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ordered_json build_info() {
  ordered_json info;
  info["size_lens"] = SIZE_LENS_VERSION;
  info["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  info["compiler"] = __VERSION__;
  return info;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

void write_manifest(const std::string& dir, const ordered_json& manifest) {
  csv::write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

struct DatasetOutcome {
  std::optional<SizeLawReport> report;
  std::optional<WeightSolution> solution;
  std::optional<DatasetBundle> bundle;
  std::optional<Error> error;
  double kkt_tolerance = 0.0;
};

int cmd_analyze(const AnalyzeConfig& config, const std::vector<std::string>& argv, std::ostream& out,
                std::ostream& err) {
  if (config.features.size() != config.similarities.size()) {
    err << "error: --features and --similarity must be given the same number of times\n";
    return kUsage;
  }
  if (!config.names.empty() && config.names.size() != config.features.size()) {
    err << "error: --name must be given once per dataset or not at all\n";
    return kUsage;
  }
  prepare_out_dir(config.out_dir);

  const std::size_t n = config.features.size();
  std::vector<std::string> names(n);
  for (std::size_t d = 0; d < n; ++d) {
    names[d] = config.names.empty() ? fs::path(config.similarities[d]).stem().string() : config.names[d];
  }

  LoadOptions load;
  load.policy = config.align == "intersect" ? AlignPolicy::Intersect : AlignPolicy::Strict;
  load.min_feature_size = config.min_feature_size;
  load.max_feature_size = config.max_feature_size;
  load.normalize_similarity = config.normalize_similarity;
  load.symmetry_tolerance = config.symmetry_tolerance;

  FitOptions fit_options;
  fit_options.solver.kkt_tolerance = config.kkt_tolerance;
  fit_options.solver.max_iterations = config.max_iterations;

  std::vector<DatasetOutcome> outcomes(n);
  auto work = [&](std::size_t d) {
    auto& o = outcomes[d];
    try {
      o.bundle = load_dataset(names[d], config.features[d], config.similarities[d], load);
      o.solution = fit(o.bundle->features, o.bundle->similarity, fit_options);
      o.report = make_report(names[d], *o.solution);
    } catch (const Error& e) {
      o.error = e;
    }
  };
  const std::size_t workers = std::min(worker_limit(), n);
  if (workers <= 1) {
    for (std::size_t d = 0; d < n; ++d) work(d);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t d = next++; d < n; d = next++) work(d);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t d = 0; d < n; ++d) {
    if (outcomes[d].error) {
      err << "dataset '" << names[d] << "': ";
      report_error(err, *outcomes[d].error);
    }
  }
  for (const auto& o : outcomes) {
    if (o.error) return exit_code_for(o.error->kind());
  }

  std::vector<SizeLawReport> reports;
  std::set<std::string> used;
  ordered_json datasets = ordered_json::array();
  bool any_degenerate = false;
  for (std::size_t d = 0; d < n; ++d) {
    const auto& o = outcomes[d];
    const SizeLawReport& r = *o.report;
    reports.push_back(r);
    std::string stem = slug(names[d]);
    for (int suffix = 2; used.contains(stem); ++suffix) stem = slug(names[d]) + "_" + std::to_string(suffix);
    used.insert(stem);

    const fs::path dir(config.out_dir);
    write_weights_csv(o.solution->feature_names, o.solution->feature_sizes, o.solution->weights,
                      (dir / (stem + ".weights.csv")).string());
    ordered_json entry;
    entry["name"] = names[d];
    entry["features"] = config.features[d];
    entry["similarity"] = config.similarities[d];
    entry["objects"] = o.bundle->features.n_objects();
    entry["candidate_features"] = o.bundle->features.n_features();
    entry["filters"] = o.bundle->provenance.filters;
    entry["dropped_similarity_objects"] = o.bundle->provenance.dropped_similarity_objects;
    entry["dropped_feature_objects"] = o.bundle->provenance.dropped_feature_objects;
    entry["solver_iterations"] = o.solution->iterations;
    entry["solver_warnings"] = o.solution->warnings;
    entry["weights_file"] = stem + ".weights.csv";
    if (r.points.size() >= 2) {
      write_scatter_svg(r, (dir / (stem + ".svg")).string());
      entry["plot"] = stem + ".svg";
    } else {
      entry["plot"] = nullptr;
    }
    entry["status"] = r.degenerate() ? r.degenerate_reason : "ok";
    datasets.push_back(std::move(entry));

    if (r.degenerate()) {
      any_degenerate = true;
      err << "dataset '" << names[d] << "': size-law statistics unavailable (" << r.degenerate_reason << ")\n";
    } else {
      out << names[d] << ": pearson=" << csv::format_fixed(*r.pearson, 2)
          << " spearman=" << csv::format_fixed(*r.spearman, 2) << " FR=" << r.fr_nonzero << "/" << r.fr_total
          << " R2_MP=" << (r.r_squared_mp ? csv::format_fixed(*r.r_squared_mp, 2) : "NA")
          << " slope=" << csv::format_fixed(*r.slope, 4) << '\n';
    }
  }
  write_table(reports, (fs::path(config.out_dir) / "table.csv").string());

  ordered_json manifest;
  manifest["subcommand"] = "analyze";
  manifest["argv"] = argv;
  manifest["build"] = build_info();
  ordered_json settings;
  settings["align"] = config.align;
  settings["normalize_similarity"] = config.normalize_similarity;
  settings["min_feature_size"] = optional_json(config.min_feature_size);
  settings["max_feature_size"] = optional_json(config.max_feature_size);
  settings["symmetry_tolerance"] = config.symmetry_tolerance ? ordered_json(*config.symmetry_tolerance)
                                                             : ordered_json("1e-9 * max |cell|");
  settings["kkt_tolerance"] = config.kkt_tolerance ? ordered_json(*config.kkt_tolerance)
                                                   : ordered_json("1e-10 * (1 + max column norm)");
  settings["max_iterations"] = config.max_iterations ? ordered_json(*config.max_iterations)
                                                     : ordered_json("3 * number of features");
  settings["intercept"] = false;
  settings["r_squared"] = "squared Pearson correlation over off-diagonal pairs";
  settings["log_base"] = "e";
  manifest["settings"] = settings;
  manifest["datasets"] = datasets;
  manifest["outputs"] = {"table.csv", "table.full.csv"};
  write_manifest(config.out_dir, manifest);

  return any_degenerate ? kStatistics : kOk;
}

WeightLaw parse_law(const std::string& law) {
  if (law == "inverse-size") return WeightLaw::InverseSize;
  if (law == "inverse-size-squared") return WeightLaw::InverseSizeSquared;
  return WeightLaw::Uniform;
}

int cmd_simulate(const SimulateConfig& config, const std::vector<std::string>& argv, std::ostream& out,
                 std::ostream& err) {
  if (config.from_generalization && config.noise_sd > 0.0) {
    err << "error: --noise-sd cannot be combined with --from-generalization\n";
    return kUsage;
  }
  prepare_out_dir(config.out_dir);
  PlantOptions options;
  options.cover_all_objects = config.from_generalization;
  PlantedDataset planted =
      plant_dataset(config.objects, config.n_features, parse_law(config.law), config.noise_sd, config.seed, options);

  const std::vector<std::size_t> sizes = planted.features.feature_sizes();
  Eigen::VectorXd weights = planted.weights;
  std::string similarity_source = "additive-clustering model with planted weights";
  std::string weight_meaning = config.law;
  if (config.from_generalization) {
    const HypothesisSpace space = HypothesisSpace::from_features(planted.features, SamplingMode::Strong);
    planted.similarity = generalization_matrix(space, config.n_examples);
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      weights(k) = std::pow(1.0 / static_cast<double>(sizes[static_cast<std::size_t>(k)]),
                            static_cast<double>(config.n_examples));
    }
    similarity_source = "Bayesian generalization, strong sampling, uniform prior";
    weight_meaning = "strong-sampling likelihood (1/|h|)^n";
  }

  const fs::path dir(config.out_dir);
  write_feature_csv(planted.features, (dir / "features.csv").string());
  write_similarity_csv(planted.similarity, (dir / "similarity.csv").string());
  write_weights_csv(planted.features.feature_names(), sizes, weights, (dir / "planted_weights.csv").string());

  ordered_json manifest;
  manifest["subcommand"] = "simulate";
  manifest["argv"] = argv;
  manifest["build"] = build_info();
  ordered_json settings;
  settings["objects"] = config.objects;
  settings["n_features"] = config.n_features;
  settings["law"] = config.law;
  settings["noise_sd"] = config.noise_sd;
  settings["seed"] = config.seed;
  settings["feature_probability"] = options.feature_probability;
  settings["retry_limit"] = options.retry_limit;
  settings["from_generalization"] = config.from_generalization;
  settings["n_examples"] = config.n_examples;
  settings["rng"] = "std::mt19937_64";
  manifest["settings"] = settings;
  manifest["similarity_source"] = similarity_source;
  manifest["planted_weights"] = weight_meaning;
  manifest["outputs"] = {"features.csv", "similarity.csv", "planted_weights.csv"};
  write_manifest(config.out_dir, manifest);

  out << "wrote " << config.objects << " objects x " << config.n_features << " features to " << config.out_dir
      << '\n';
  return kOk;
}

int cmd_report(const ReportConfig& config, const std::vector<std::string>& argv, std::ostream& out,
               std::ostream& err) {
  std::vector<SizeLawReport> rows;
  for (const auto& path : config.tables) {
    auto table = read_full_table(path);
    rows.insert(rows.end(), std::make_move_iterator(table.begin()), std::make_move_iterator(table.end()));
  }
  std::vector<double> pearsons, spearmans;
  std::size_t excluded = 0;
  for (const auto& r : rows) {
    if (r.degenerate() || !r.pearson || !r.spearman) {
      ++excluded;
      continue;
    }
    pearsons.push_back(*r.pearson);
    spearmans.push_back(*r.spearman);
  }
  if (pearsons.size() < 2) {
    throw Error(ErrorCode::TooFewDatasets, "cross-dataset t-tests need at least 2 complete rows, found " +
                                               std::to_string(pearsons.size()));
  }
  const std::vector<NamedTTest> tests = {
      {"pearson", one_sample_ttest_negative(pearsons), excluded},
      {"spearman", one_sample_ttest_negative(spearmans), excluded},
  };

  prepare_out_dir(config.out_dir);
  const fs::path dir(config.out_dir);
  write_table(rows, (dir / "table.csv").string());
  write_ttest_summary(tests, (dir / "ttest.csv").string());

  ordered_json manifest;
  manifest["subcommand"] = "report";
  manifest["argv"] = argv;
  manifest["build"] = build_info();
  manifest["inputs"] = config.tables;
  manifest["rows"] = rows.size();
  manifest["excluded_degenerate_rows"] = excluded;
  manifest["outputs"] = {"table.csv", "table.full.csv", "ttest.csv"};
  write_manifest(config.out_dir, manifest);

  for (const auto& t : tests) {
    out << "mean " << t.name << " = " << csv::format_fixed(t.result.mean, 4) << ", t(" << t.result.degrees_of_freedom
        << ") = " << csv::format_fixed(t.result.t_statistic, 4) << ", p " << (t.result.p_value_one_sided < 1e-4 ? "" : "= ")
        << format_p_value(t.result.p_value_one_sided) << '\n';
  }
  if (excluded > 0) err << excluded << " degenerate row(s) excluded\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"size-lens: fit additive-clustering weights and test the size principle"};
  app.require_subcommand(1);

  AnalyzeConfig analyze;
  auto* a = app.add_subcommand("analyze", "Fit feature weights and report size/weight statistics");
  a->add_option("--features", analyze.features, "Feature CSV (repeat once per dataset)")->required();
  a->add_option("--similarity", analyze.similarities, "Similarity CSV (repeat once per dataset)")->required();
  a->add_option("--name", analyze.names, "Dataset name (repeat once per dataset)");
  a->add_option("--min-feature-size", analyze.min_feature_size, "Drop features with fewer objects");
  a->add_option("--max-feature-size", analyze.max_feature_size, "Drop features with more objects");
  a->add_option("--align", analyze.align, "Object matching policy")
      ->check(CLI::IsMember({"strict", "intersect"}))
      ->capture_default_str();
  a->add_flag("--normalize-similarity", analyze.normalize_similarity, "Min-max rescale similarities to [0, 1]");
  a->add_option("--symmetry-tol", analyze.symmetry_tolerance, "Largest accepted |s_ij - s_ji|");
  a->add_option("--kkt-tol", analyze.kkt_tolerance, "NNLS optimality tolerance")->check(CLI::PositiveNumber);
  a->add_option("--max-iter", analyze.max_iterations, "NNLS iteration limit");
  a->add_option("--out-dir", analyze.out_dir, "Output directory")->required();

  SimulateConfig simulate;
  auto* s = app.add_subcommand("simulate", "Write a synthetic dataset with planted size-principle weights");
  s->add_option("--objects", simulate.objects, "Number of objects")->capture_default_str()->check(CLI::Range(3, 100000));
  s->add_option("--n-features,--features", simulate.n_features, "Number of features")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));
  s->add_option("--law", simulate.law, "Planted weight law")
      ->check(CLI::IsMember({"inverse-size", "inverse-size-squared", "uniform"}))
      ->capture_default_str();
  s->add_option("--noise-sd", simulate.noise_sd, "Gaussian noise on similarities")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", simulate.seed, "Random seed")->required();
  s->add_flag("--from-generalization", simulate.from_generalization,
              "Derive similarities from the Bayesian generalization model");
  s->add_option("--n-examples", simulate.n_examples, "Examples per generalization query")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_option("--out-dir", simulate.out_dir, "Output directory")->required();

  ReportConfig report;
  auto* r = app.add_subcommand("report", "Merge full-precision tables and run cross-dataset t-tests");
  r->add_option("tables", report.tables, "Full-precision table CSVs (*.full.csv)")->required();
  r->add_option("--out-dir", report.out_dir, "Output directory")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("size-lens");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : argv_storage) argv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*a) return cmd_analyze(analyze, args, out, err);
    if (*s) return cmd_simulate(simulate, args, out, err);
    if (*r) return cmd_report(report, args, out, err);
  } catch (const Error& e) {
    report_error(err, e);
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[IoError]: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace size_lens::cli
