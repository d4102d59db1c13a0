#include "size_lens/report.hpp"

#include "size_lens/csv.hpp"
#include "size_lens/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace size_lens {

namespace {

const std::vector<std::string> kDisplayHeader = {"Set", "Pearson", "Spearman", "FR_nonzero",
                                                 "FR_total", "R2_MP", "Slope", "N"};
const std::vector<std::string> kFullExtra = {"Intercept", "Pearson_p", "Spearman_p", "Note"};

std::string fixed_or_na(const std::optional<double>& v, int decimals) {
  return v && std::isfinite(*v) ? csv::format_fixed(*v, decimals) : "NA";
}

std::string exact_or_na(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? csv::format_exact(*v) : "NA";
}

std::string fmt2(double v) { return csv::format_fixed(v, 2); }

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

SizeLawReport make_report(const std::string& set_name, const WeightSolution& solution) {
  SizeLawReport report;
  report.set_name = set_name;
  report.fr_nonzero = solution.fr_nonzero;
  report.fr_total = solution.fr_total;
  report.r_squared_mp = solution.r_squared;
  try {
    report.points = extract_points(solution);
    report.n_points = report.points.size();
    const SizeLawStats stats = analyze(solution);
    report.pearson = stats.pearson;
    report.spearman = stats.spearman;
    report.slope = stats.slope;
    report.intercept = stats.intercept;
    report.pearson_p_value = stats.pearson_p_value;
    report.spearman_p_value = stats.spearman_p_value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Statistics) throw;
    report.degenerate_reason = std::string(to_string(e.code()));
  }
  return report;
}

std::string full_table_path(const std::string& path) {
  const std::string suffix = ".csv";
  if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size()) + ".full.csv";
  }
  return path + ".full.csv";
}

void write_table(std::span<const SizeLawReport> reports, const std::string& path) {
  std::string display = csv::join(kDisplayHeader) + "\n";
  std::vector<std::string> full_header = kDisplayHeader;
  full_header.insert(full_header.end(), kFullExtra.begin(), kFullExtra.end());
  std::string full = csv::join(full_header) + "\n";
  for (const auto& r : reports) {
    display += csv::join({csv::escape(r.set_name), fixed_or_na(r.pearson, 2), fixed_or_na(r.spearman, 2),
                          std::to_string(r.fr_nonzero), std::to_string(r.fr_total), fixed_or_na(r.r_squared_mp, 2),
                          fixed_or_na(r.slope, 4), std::to_string(r.n_points)}) +
               "\n";
    full += csv::join({csv::escape(r.set_name), exact_or_na(r.pearson), exact_or_na(r.spearman),
                       std::to_string(r.fr_nonzero), std::to_string(r.fr_total), exact_or_na(r.r_squared_mp),
                       exact_or_na(r.slope), std::to_string(r.n_points), exact_or_na(r.intercept),
                       exact_or_na(r.pearson_p_value), exact_or_na(r.spearman_p_value),
                       r.degenerate_reason.empty() ? "ok" : csv::escape(r.degenerate_reason)}) +
            "\n";
  }
  csv::write_file(path, display);
  csv::write_file(full_table_path(path), full);
}

std::vector<SizeLawReport> read_full_table(const std::string& path) {
  const auto records = csv::read_file(path);
  if (records.empty()) {
    throw Error(ErrorCode::ParseError, "table is empty", SourceLocation{path, 0, 0});
  }
  std::map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < records.front().fields.size(); ++c) {
    column[std::string(csv::trim(records.front().fields[c]))] = c;
  }
  for (const char* required : {"Set", "Pearson", "Spearman", "FR_nonzero", "FR_total", "R2_MP", "Slope", "N"}) {
    if (!column.contains(required)) {
      throw Error(ErrorCode::ParseError, std::string("missing column '") + required + "'",
                  SourceLocation{path, records.front().line, 0});
    }
  }
  std::vector<SizeLawReport> reports;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != records.front().fields.size()) {
      throw Error(ErrorCode::ParseError, "row width differs from the header", SourceLocation{path, rec.line, 0});
    }
    auto optional_number = [&](const char* name) -> std::optional<double> {
      const auto it = column.find(name);
      if (it == column.end()) return std::nullopt;
      const std::string_view text = csv::trim(rec.fields[it->second]);
      if (text == "NA" || text.empty()) return std::nullopt;
      const auto v = csv::parse_number(text);
      if (!v) {
        throw Error(ErrorCode::ParseError, "cannot parse '" + std::string(text) + "' in column " + name,
                    SourceLocation{path, rec.line, it->second + 1});
      }
      return v;
    };
    auto count = [&](const char* name) -> std::size_t {
      const auto v = optional_number(name);
      if (!v || *v < 0 || std::floor(*v) != *v) {
        throw Error(ErrorCode::ParseError, std::string("column ") + name + " needs a non-negative integer",
                    SourceLocation{path, rec.line, column[name] + 1});
      }
      return static_cast<std::size_t>(*v);
    };
    SizeLawReport report;
    report.set_name = rec.fields[column["Set"]];
    report.pearson = optional_number("Pearson");
    report.spearman = optional_number("Spearman");
    report.fr_nonzero = count("FR_nonzero");
    report.fr_total = count("FR_total");
    report.r_squared_mp = optional_number("R2_MP");
    report.slope = optional_number("Slope");
    report.n_points = count("N");
    report.intercept = optional_number("Intercept");
    report.pearson_p_value = optional_number("Pearson_p");
    report.spearman_p_value = optional_number("Spearman_p");
    if (column.contains("Note")) {
      const std::string note(csv::trim(rec.fields[column["Note"]]));
      if (note != "ok") report.degenerate_reason = note;
    }
    if (report.degenerate_reason.empty() && (!report.pearson || !report.spearman)) {
      report.degenerate_reason = "NA";
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string render_scatter_svg(const SizeLawReport& report) {
  if (report.points.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "a scatter plot needs at least 2 points, '" + report.set_name + "' has " +
                                             std::to_string(report.points.size()));
  }
  std::vector<double> zx, zy;
  double extent = 1.0;
  for (const auto& p : report.points) {
    zx.push_back(p.z_log_size);
    zy.push_back(p.z_log_weight);
    extent = std::max({extent, std::abs(p.z_log_size), std::abs(p.z_log_weight)});
  }
  // Symmetric square domain [-half, half] rounded up to a half unit.
  const double half = std::ceil(extent * 1.1 * 2.0) / 2.0;

  constexpr double width = 480.0, height = 480.0;
  constexpr double left = 70.0, right = 20.0, top = 50.0, bottom = 60.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x + half) / (2.0 * half) * plot_w; };
  auto py = [&](double y) { return top + (half - y) / (2.0 * half) * plot_h; };

  std::string svg;
  auto add = [&](const std::string& s) { svg += s; svg += '\n'; };
  add("<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
  add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">");
  add("<rect width=\"480\" height=\"480\" fill=\"white\"/>");
  add("<defs><clipPath id=\"plot-area\"><rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(top) + "\" width=\"" +
      fmt2(plot_w) + "\" height=\"" + fmt2(plot_h) + "\"/></clipPath></defs>");
  add("<text x=\"240.00\" y=\"28.00\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
      xml_escape(report.set_name) + "</text>");
  add("<rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(top) + "\" width=\"" + fmt2(plot_w) + "\" height=\"" +
      fmt2(plot_h) + "\" fill=\"none\" stroke=\"#444\"/>");

  for (double tick = -std::floor(half); tick <= std::floor(half); tick += 1.0) {
    const std::string label = csv::format_fixed(tick, 0);
    add("<line x1=\"" + fmt2(px(tick)) + "\" y1=\"" + fmt2(top + plot_h) + "\" x2=\"" + fmt2(px(tick)) + "\" y2=\"" +
        fmt2(top + plot_h + 5.0) + "\" stroke=\"#444\"/>");
    add("<text x=\"" + fmt2(px(tick)) + "\" y=\"" + fmt2(top + plot_h + 18.0) +
        "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + label + "</text>");
    add("<line x1=\"" + fmt2(left - 5.0) + "\" y1=\"" + fmt2(py(tick)) + "\" x2=\"" + fmt2(left) + "\" y2=\"" +
        fmt2(py(tick)) + "\" stroke=\"#444\"/>");
    add("<text x=\"" + fmt2(left - 8.0) + "\" y=\"" + fmt2(py(tick) + 4.0) +
        "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label + "</text>");
  }
  add("<text x=\"" + fmt2(left + plot_w / 2.0) + "\" y=\"" + fmt2(height - 15.0) +
      "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">log feature size (z)</text>");
  add("<text x=\"18.00\" y=\"" + fmt2(top + plot_h / 2.0) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"13\" transform=\"rotate(-90 18.00 " + fmt2(top + plot_h / 2.0) + ")\">log feature weight (z)</text>");

  add("<g clip-path=\"url(#plot-area)\">");
  for (std::size_t i = 0; i < zx.size(); ++i) {
    add("<circle cx=\"" + fmt2(px(zx[i])) + "\" cy=\"" + fmt2(py(zy[i])) +
        "\" r=\"3.5\" fill=\"#1f77b4\" fill-opacity=\"0.7\"><title>" + xml_escape(report.points[i].feature_name) +
        "</title></circle>");
  }
  // Size-principle prediction: slope -1 through the origin of z-space.
  add("<line class=\"reference\" data-z=\"" + csv::format_exact(-half) + " " + csv::format_exact(half) + " " +
      csv::format_exact(half) + " " + csv::format_exact(-half) + "\" x1=\"" + fmt2(px(-half)) + "\" y1=\"" +
      fmt2(py(half)) + "\" x2=\"" + fmt2(px(half)) + "\" y2=\"" + fmt2(py(-half)) +
      "\" stroke=\"red\" stroke-width=\"1.5\"/>");
  try {
    const LineFit line = fit_line(zx, zy);
    const double y1 = line.slope * -half + line.intercept;
    const double y2 = line.slope * half + line.intercept;
    add("<line class=\"best-fit\" data-z=\"" + csv::format_exact(-half) + " " + csv::format_exact(y1) + " " +
        csv::format_exact(half) + " " + csv::format_exact(y2) + "\" data-slope=\"" + csv::format_exact(line.slope) +
        "\" x1=\"" + fmt2(px(-half)) + "\" y1=\"" + fmt2(py(y1)) + "\" x2=\"" + fmt2(px(half)) + "\" y2=\"" +
        fmt2(py(y2)) + "\" stroke=\"black\" stroke-width=\"1.5\"/>");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    add("<!-- no best-fit line: feature sizes do not vary -->");
  }
  add("</g>");
  add("</svg>");
  return svg;
}

void write_scatter_svg(const SizeLawReport& report, const std::string& path) {
  csv::write_file(path, render_scatter_svg(report));
}

std::string format_p_value(double p) {
  if (!std::isfinite(p)) return "NA";
  if (p < 1e-4) return "<0.0001";
  return csv::format_fixed(p, 4);
}

void write_ttest_summary(std::span<const NamedTTest> results, const std::string& path) {
  std::string out = "statistic,t,df,p_one_sided,mean,sd,n,excluded\n";
  for (const auto& r : results) {
    out += csv::join({csv::escape(r.name), csv::format_fixed(r.result.t_statistic, 4),
                      std::to_string(r.result.degrees_of_freedom), format_p_value(r.result.p_value_one_sided),
                      csv::format_fixed(r.result.mean, 4), csv::format_fixed(r.result.sample_sd, 4),
                      std::to_string(r.result.degrees_of_freedom + 1), std::to_string(r.excluded)}) +
           "\n";
  }
  csv::write_file(path, out);
}

void write_feature_csv(const FeatureMatrix& features, const std::string& path) {
  std::vector<std::string> row{"object"};
  for (const auto& name : features.feature_names()) row.push_back(csv::escape(name));
  std::string out = csv::join(row) + "\n";
  for (Eigen::Index i = 0; i < features.n_objects(); ++i) {
    row.assign(1, csv::escape(features.object_names()[i]));
    for (Eigen::Index k = 0; k < features.n_features(); ++k) row.push_back(features.has(i, k) ? "1" : "0");
    out += csv::join(row) + "\n";
  }
  csv::write_file(path, out);
}

void write_similarity_csv(const SimilarityMatrix& similarity, const std::string& path) {
  std::vector<std::string> row{"object"};
  for (const auto& name : similarity.object_names()) row.push_back(csv::escape(name));
  std::string out = csv::join(row) + "\n";
  for (Eigen::Index i = 0; i < similarity.size(); ++i) {
    row.assign(1, csv::escape(similarity.object_names()[i]));
    for (Eigen::Index j = 0; j < similarity.size(); ++j) row.push_back(csv::format_exact(similarity.cells()(i, j)));
    out += csv::join(row) + "\n";
  }
  csv::write_file(path, out);
}

void write_weights_csv(const std::vector<std::string>& feature_names, const std::vector<std::size_t>& sizes,
                       const Eigen::VectorXd& weights, const std::string& path) {
  if (feature_names.size() != sizes.size() || static_cast<Eigen::Index>(sizes.size()) != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature names, sizes and weights differ in length");
  }
  std::string out = "feature,size,weight\n";
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    out += csv::join({csv::escape(feature_names[k]), std::to_string(sizes[k]),
                      csv::format_exact(weights(static_cast<Eigen::Index>(k)))}) +
           "\n";
  }
  csv::write_file(path, out);
}

}  // namespace size_lens
