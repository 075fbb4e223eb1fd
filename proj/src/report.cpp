#include "pinchlab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "pinchlab/errors.hpp"
#include "pinchlab/metric.hpp"
#include "pinchlab/pinching.hpp"
#include "pinchlab/rng.hpp"
#include "pinchlab/stats.hpp"

namespace pinchlab {

namespace {

using nlohmann::ordered_json;

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void check_options(const ReportOptions& opts) {
  if (opts.k_max < 1 || opts.k_max > 3) {
    throw ValidationError("k_max must lie in [1, 3]");
  }
  if (opts.etas.empty()) throw ValidationError("eta grid must be nonempty");
  for (double eta : opts.etas) {
    if (!(eta > 0.0 && eta < 1.0)) {
      throw ValidationError("every eta must lie in (0, 1)");
    }
  }
  if (!(opts.outer_eta_factor >= 1.0)) {
    throw ValidationError("outer band factor must be >= 1");
  }
  if (opts.eigen_count < opts.k_max + 2 || opts.eigen_count > 64) {
    throw ValidationError("eigenpair count must lie in [k_max + 2, 64]");
  }
  if (opts.residual_pairs < 10) {
    throw ValidationError("residual sampling needs at least 10 pairs");
  }
  if (opts.excess_pairs < 1) {
    throw ValidationError("excess sampling needs at least one pair");
  }
}

ordered_json json_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.begin(), v.end());
}

ordered_json json_matrix(const Eigen::MatrixXd& m) {
  auto rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

ordered_json projection_json(const ProjectionReport& p) {
  ordered_json j;
  j["base"] = p.base;
  j["coefficients"] = json_vector(p.coefficients);
  j["residual_sup"] = p.residual_sup;
  j["residual_l2"] = p.residual_l2;
  j["coeff_norm_defect"] = p.coeff_norm_defect;
  return j;
}

}  // namespace

DiagnoseResult diagnose(const TriSurface& input, const SurfaceInfo& info,
                        const ReportOptions& opts) {
  check_options(opts);
  validate_surface(input);

  const Eigen::VectorXd curvature = angle_defect_curvature(input);
  const double kmin_input = curvature.minCoeff();

  DiagnoseResult result;
  TriSurface surf;
  double scale = 1.0;
  bool rescaled = false;
  if (kmin_input <= 0.0) {
    result.hypothesis_violated = true;
    if (!opts.force) {
      throw HypothesisViolation(
          "minimum discrete curvature " + format_number(kmin_input) +
          " is not positive; rerun with the override to diagnose anyway");
    }
    surf = input;
  } else if (opts.rescale) {
    RescaleResult r = rescale_min_curvature_to_one(input);
    surf = std::move(r.surface);
    scale = r.scale;
    rescaled = true;
  } else {
    surf = input;
  }

  const MetricGraph graph = build_metric_graph(surf);
  EigOptions eig;
  eig.count = opts.eigen_count;
  eig.seed = opts.seed;
  Spectrum spec = solve_smallest(surf, eig);
  normalize_mean_square(spec, lumped_mass(surf));

  ordered_json& rep = result.report;
  rep["schema_version"] = kSchemaVersion;

  {
    ordered_json s;
    s["generator"] = info.generator;
    s["parameters"] = info.parameters;
    s["vertices"] = static_cast<int>(surf.vertex_count());
    s["faces"] = static_cast<int>(surf.face_count());
    s["min_curvature_input"] = kmin_input;
    s["scale_factor"] = scale;
    s["rescaled"] = rescaled;
    s["hypothesis_violated"] = result.hypothesis_violated;
    ordered_json mesh;
    mesh["total_area"] = total_area(surf);
    mesh["mean_edge"] = mean_edge_length(surf);
    mesh["max_edge"] = max_edge_length(surf);
    mesh["sampling_step"] = graph.sampling_step();
    s["mesh"] = mesh;
    rep["surface"] = s;
  }

  {
    ordered_json s;
    s["eigenvalues"] = json_vector(spec.eigenvalues);
    s["residuals"] = json_vector(spec.residuals);
    auto clusters = ordered_json::array();
    for (const auto& [b, e] : spec.clusters) clusters.push_back({b, e});
    s["clusters"] = clusters;
    s["volume"] = spec.volume;
    rep["spectrum"] = s;
  }

  std::vector<AntipodalFrame> frames;
  for (int k = 1; k <= opts.k_max; ++k) {
    frames.push_back(extract_frame(spec, graph, k));
  }

  {
    ordered_json s;
    s["method"] = method_name(graph.method);
    EccentricityResult ecc = eccentricities(graph);
    s["diameter"] = ecc.diameter;
    s["radius"] = ecc.radius;
    ordered_json excess;
    const auto& pair0 = frames.front().pairs.front();
    excess["frame_pair"] = vertex_excess(graph, pair0[0], pair0[1]);
    auto rng = seeded_engine(opts.seed, streams::kExcess);
    std::uniform_int_distribution<int> pick(0, graph.n - 1);
    double worst = 0.0;
    for (int j = 0; j < opts.excess_pairs; ++j) {
      int a = pick(rng), b = pick(rng);
      while (b == a) b = pick(rng);
      worst = std::max(worst, vertex_excess(graph, a, b));
    }
    excess["random_max"] = worst;
    excess["samples"] = opts.excess_pairs;
    s["excess"] = excess;
    rep["metric"] = s;
  }

  {
    ordered_json s;
    int base = frames.front().pairs.front()[0];
    s["base"] = base;
    Eigen::VectorXd dist = geodesic_distances(graph, base).d;
    try {
      ordered_json defects;
      defects["cos"] = coarea_comparison(surf, dist, RadialKernel::Cos);
      defects["cos_squared"] = coarea_comparison(surf, dist, RadialKernel::CosSquared);
      defects["sin_squared"] = coarea_comparison(surf, dist, RadialKernel::SinSquared);
      s["defects"] = defects;
    } catch (const NoAntipode& e) {
      s["defects"] = nullptr;
      s["reason"] = e.what();
    }
    rep["radial_comparison"] = s;
  }

  {
    auto blocks = ordered_json::array();
    for (int k = 1; k <= opts.k_max; ++k) {
      const AntipodalFrame& frame = frames[static_cast<size_t>(k - 1)];
      ordered_json b;
      b["k"] = k;
      b["eta_star"] = pk_deficiency(frame);
      ordered_json fj;
      auto pairs = ordered_json::array();
      for (const auto& p : frame.pairs) pairs.push_back({p[0], p[1]});
      fj["pairs"] = pairs;
      fj["pair_distances"] = json_vector(frame.pair_distances());
      fj["cross_xx"] = json_matrix(frame.dist_xx);
      fj["cross_xy"] = json_matrix(frame.dist_xy);
      fj["cross_yy"] = json_matrix(frame.dist_yy);
      b["frame"] = fj;
      auto projections = ordered_json::array();
      for (const auto& p : frame.pairs) {
        projections.push_back(projection_json(project_cos_distance(spec, surf, graph, p[0], k)));
        projections.push_back(projection_json(project_cos_distance(spec, surf, graph, p[1], k)));
      }
      b["projections"] = projections;
      b["li_yau_max_ratio"] = li_yau_check(spec, surf, k);
      b["eikonal_defect"] = eikonal_defect(spec, surf, k);
      ResidualSummary res =
          residual_distribution(spec, k, surf, graph, opts.residual_pairs, opts.seed);
      ordered_json rj;
      rj["pairs"] = opts.residual_pairs;
      rj["median"] = res.median;
      rj["p90"] = res.p90;
      b["residuals"] = rj;
      blocks.push_back(b);
    }
    rep["pinching"] = blocks;
  }

  {
    auto blocks = ordered_json::array();
    for (int k = 1; k <= opts.k_max; ++k) {
      for (double eta : opts.etas) {
        const double outer_eta = opts.outer_eta_factor * eta;
        AlmostEquator inner = almost_equator(spec, surf, k, eta);
        AlmostEquator outer = almost_equator(spec, surf, k, outer_eta);
        ordered_json b;
        b["k"] = k;
        b["eta"] = eta;
        b["outer_eta"] = outer_eta;
        ordered_json band;
        band["size"] = static_cast<int>(inner.vertices.size());
        band["fraction"] = static_cast<double>(inner.vertices.size()) /
                           static_cast<double>(surf.vertex_count());
        band["components"] = inner.component_count;
        b["band"] = band;
        b["petersen_bound"] = petersen_bound_check(spec, k);
        if (inner.empty()) {
          b["defects"] = nullptr;
          b["reason"] = "empty band";
        } else {
          SphereMapReport smr =
              build_sphere_map_report(spec, inner, outer, graph, opts.equator_samples,
                                      opts.seed);
          ordered_json d;
          d["surjectivity"] = smr.surjectivity_defect;
          d["distortion_cos"] = smr.distortion_cos;
          d["distortion_angular"] = smr.distortion_angular;
          d["gh_defect"] = smr.gh_defect;
          d["convexity"] = smr.convexity_defect;
          d["disconnections"] = smr.disconnections;
          d["antipode"] = smr.antipode_defect;
          d["gradient_max"] = equator_gradient_check(spec, surf, inner);
          b["defects"] = d;
        }
        blocks.push_back(b);
      }
    }
    rep["equator"] = blocks;
  }

  {
    ordered_json p;
    p["tool_version"] = kToolVersion;
    p["seed"] = opts.seed;
    p["created"] = utc_timestamp();
    rep["provenance"] = p;
  }

  result.spectrum = std::move(spec);
  return result;
}

namespace {

// Flat CSV columns for one report; the set depends only on the options.
std::vector<std::string> csv_columns(const std::string& parameter,
                                     const ReportOptions& opts) {
  std::vector<std::string> cols{parameter,
                                "vertices",
                                "faces",
                                "scale_factor",
                                "min_curvature_input",
                                "hypothesis_violated"};
  for (int i = 0; i < opts.eigen_count; ++i) cols.push_back("lambda_" + std::to_string(i));
  cols.insert(cols.end(), {"diameter", "radius", "pi_minus_diameter", "excess_frame_pair",
                           "excess_random_max"});
  for (int k = 1; k <= opts.k_max; ++k) {
    std::string kk = "_k" + std::to_string(k);
    cols.push_back("eta_star" + kk);
    cols.push_back("li_yau" + kk);
    cols.push_back("eikonal" + kk);
    cols.push_back("residual_median" + kk);
    cols.push_back("residual_p90" + kk);
    cols.push_back("petersen" + kk);
    for (double eta : opts.etas) {
      std::string suffix = kk + "_eta" + format_number(eta);
      cols.push_back("band_size" + suffix);
      cols.push_back("surjectivity" + suffix);
      cols.push_back("distortion_cos" + suffix);
      cols.push_back("distortion_angular" + suffix);
      cols.push_back("gh_defect" + suffix);
      cols.push_back("convexity" + suffix);
      cols.push_back("disconnections" + suffix);
      cols.push_back("antipode" + suffix);
      cols.push_back("gradient_max" + suffix);
    }
  }
  return cols;
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  return v.get<std::string>();
}

// Pulls one flattened row out of a report in csv_columns order.
std::vector<ordered_json> csv_row(const ordered_json& rep, double param_value,
                                  const ReportOptions& opts) {
  std::vector<ordered_json> row;
  row.push_back(param_value);
  row.push_back(rep["surface"]["vertices"]);
  row.push_back(rep["surface"]["faces"]);
  row.push_back(rep["surface"]["scale_factor"]);
  row.push_back(rep["surface"]["min_curvature_input"]);
  row.push_back(rep["surface"]["hypothesis_violated"]);
  const auto& eigenvalues = rep["spectrum"]["eigenvalues"];
  for (int i = 0; i < opts.eigen_count; ++i) row.push_back(eigenvalues[static_cast<size_t>(i)]);
  double diameter = rep["metric"]["diameter"].get<double>();
  row.push_back(diameter);
  row.push_back(rep["metric"]["radius"]);
  row.push_back(std::numbers::pi - diameter);
  row.push_back(rep["metric"]["excess"]["frame_pair"]);
  row.push_back(rep["metric"]["excess"]["random_max"]);
  for (int k = 1; k <= opts.k_max; ++k) {
    const auto& pb = rep["pinching"][static_cast<size_t>(k - 1)];
    row.push_back(pb["eta_star"]);
    row.push_back(pb["li_yau_max_ratio"]);
    row.push_back(pb["eikonal_defect"]);
    row.push_back(pb["residuals"]["median"]);
    row.push_back(pb["residuals"]["p90"]);
    size_t base = static_cast<size_t>(k - 1) * opts.etas.size();
    row.push_back(rep["equator"][base]["petersen_bound"]);
    for (size_t e = 0; e < opts.etas.size(); ++e) {
      const auto& eb = rep["equator"][base + e];
      row.push_back(eb["band"]["size"]);
      const auto& d = eb["defects"];
      for (const char* key : {"surjectivity", "distortion_cos", "distortion_angular",
                              "gh_defect", "convexity", "disconnections", "antipode",
                              "gradient_max"}) {
        row.push_back(d.is_null() ? ordered_json(nullptr) : d[key]);
      }
    }
  }
  return row;
}

void add_trend(ordered_json& trends, const std::string& name,
               const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() >= 3) {
    double rho = spearman(x, y);
    if (std::isfinite(rho)) {
      trends[name] = rho;
      return;
    }
  }
  trends[name] = nullptr;
  trends[name + "_reason"] = x.size() < 3 ? "fewer than 3 usable points"
                                          : "rank correlation undefined";
}

}  // namespace

SweepResult run_sweep(const SweepOptions& opts) {
  check_options(opts.report);
  const bool spheroid_kind = opts.generator == "spheroid";
  if (!spheroid_kind && opts.generator != "dumbbell") {
    throw ValidationError("sweep generator must be 'spheroid' or 'dumbbell'");
  }
  const std::string expected_param = spheroid_kind ? "ratio" : "neck";
  if (opts.parameter != expected_param) {
    throw ValidationError("sweep over '" + opts.generator + "' varies '" +
                          expected_param + "', got '" + opts.parameter + "'");
  }
  if (opts.grid.size() < 3) {
    throw ValidationError("sweep grid needs at least 3 points");
  }
  for (size_t i = 1; i < opts.grid.size(); ++i) {
    if (!(opts.grid[i] > opts.grid[i - 1])) {
      throw ValidationError("sweep grid must be strictly increasing");
    }
  }

  SweepResult result;
  auto points = ordered_json::array();
  std::ostringstream csv;
  const std::vector<std::string> cols = csv_columns(opts.parameter, opts.report);
  for (size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
  csv << "\n";

  for (double value : opts.grid) {
    ordered_json status;
    status[opts.parameter] = value;
    try {
      TriSurface surf = spheroid_kind ? spheroid(value, opts.subdivisions)
                                      : dumbbell(value, opts.subdivisions);
      SurfaceInfo info;
      info.generator = opts.generator;
      info.parameters[opts.parameter] = value;
      info.parameters["subdivisions"] = opts.subdivisions;
      if (!spheroid_kind) {
        DumbbellProfile prof = dumbbell_profile(value);
        info.parameters["profile_scale"] = prof.scale;
        info.parameters["profile_z0"] = prof.z0;
        info.parameters["profile_b"] = prof.b;
        info.parameters["profile_z_end"] = prof.z_end;
      }
      DiagnoseResult point = diagnose(surf, info, opts.report);
      status["ok"] = true;
      status["hypothesis_violated"] = point.hypothesis_violated;
      std::vector<ordered_json> row = csv_row(point.report, value, opts.report);
      for (size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << csv_cell(row[c]);
      csv << "\n";
      char stem[64];
      std::snprintf(stem, sizeof(stem), "report_%s_%.6g", opts.parameter.c_str(), value);
      result.report_names.push_back(stem);
      result.reports.push_back(std::move(point.report));
    } catch (const std::exception& e) {
      status["ok"] = false;
      status["error"] = e.what();
    }
    points.push_back(status);
  }

  if (result.reports.empty()) {
    throw SolverError("every sweep point failed");
  }

  // Trend statistics over the successful points.
  auto column = [&](auto&& extract) {
    std::vector<double> out;
    for (const auto& rep : result.reports) out.push_back(extract(rep));
    return out;
  };
  std::vector<double> lambda1 = column([](const ordered_json& r) {
    return r["spectrum"]["eigenvalues"][1].get<double>() - 2.0;
  });
  std::vector<double> diameter_gap = column([](const ordered_json& r) {
    return std::numbers::pi - r["metric"]["diameter"].get<double>();
  });
  ordered_json trends;
  add_trend(trends, "pi_minus_diameter_vs_lambda1_gap", diameter_gap, lambda1);
  if (opts.report.k_max >= 2) {
    std::vector<double> lambda2 = column([](const ordered_json& r) {
      return r["spectrum"]["eigenvalues"][2].get<double>() - 2.0;
    });
    std::vector<double> eta2 = column([](const ordered_json& r) {
      return r["pinching"][1]["eta_star"].get<double>();
    });
    add_trend(trends, "eta_star_k2_vs_lambda2_gap", eta2, lambda2);
    // gh defect read at the eta closest to 0.1 on the configured grid
    size_t pick = 0;
    for (size_t e = 0; e < opts.report.etas.size(); ++e) {
      if (std::abs(opts.report.etas[e] - 0.1) <
          std::abs(opts.report.etas[pick] - 0.1)) {
        pick = e;
      }
    }
    const double gh_eta = opts.report.etas[pick];
    bool usable = true;
    std::vector<double> gh2;
    for (const auto& rep : result.reports) {
      const auto& block = rep["equator"][opts.report.etas.size() + pick];
      if (block["defects"].is_null()) {
        usable = false;
        break;
      }
      gh2.push_back(block["defects"]["gh_defect"].get<double>());
    }
    std::string gh_name = "gh_defect_k2_eta" + format_number(gh_eta) + "_vs_lambda2_gap";
    if (usable) {
      add_trend(trends, gh_name, gh2, lambda2);
    } else {
      trends[gh_name] = nullptr;
      trends[gh_name + "_reason"] = "empty band at some sweep point";
    }
  }

  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["generator"] = opts.generator;
  summary["parameter"] = opts.parameter;
  summary["grid"] = opts.grid;
  summary["subdivisions"] = opts.subdivisions;
  summary["points"] = points;
  summary["trends"] = trends;
  ordered_json prov;
  prov["tool_version"] = kToolVersion;
  prov["seed"] = opts.report.seed;
  prov["created"] = utc_timestamp();
  summary["provenance"] = prov;
  result.summary = std::move(summary);
  result.csv = csv.str();
  return result;
}

void write_text_atomic(const std::string& text, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path tmp = fs::path(path);
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, fs::path(path));
}

void write_json_atomic(const nlohmann::ordered_json& j, const std::string& path) {
  write_text_atomic(j.dump(2) + "\n", path);
}

}  // namespace pinchlab
