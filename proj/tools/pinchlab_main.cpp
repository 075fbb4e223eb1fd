// Command-line front end: surface generation, full diagnostic reports,
// parameter sweeps, and 1-D comparison checks. Exit codes: 0 success,
// 2 rejected input, 3 numeric guard, 4 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinchlab/errors.hpp"
#include "pinchlab/odecmp.hpp"
#include "pinchlab/report.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/surface.hpp"

namespace {

using nlohmann::ordered_json;
using namespace pinchlab;

struct SurfaceArgs {
  std::string generator;  // icosphere | spheroid | dumbbell
  int subdivisions = 3;
  double ratio = 1.0;
  double neck = 0.5;
};

void add_surface_flags(CLI::App* cmd, SurfaceArgs& args, bool as_flag) {
  if (as_flag) {
    cmd->add_option("--generator", args.generator, "icosphere, spheroid, or dumbbell")
        ->check(CLI::IsMember({"icosphere", "spheroid", "dumbbell"}));
  } else {
    cmd->add_option("kind", args.generator, "icosphere, spheroid, or dumbbell")
        ->required()
        ->check(CLI::IsMember({"icosphere", "spheroid", "dumbbell"}));
  }
  cmd->add_option("--subdiv", args.subdivisions, "icosahedron refinement level");
  cmd->add_option("--ratio", args.ratio, "spheroid axis ratio c/a");
  cmd->add_option("--neck", args.neck, "dumbbell neck-to-lobe ratio");
}

TriSurface build_surface(const SurfaceArgs& args, SurfaceInfo& info) {
  info.generator = args.generator;
  info.parameters = ordered_json::object();
  TriSurface surf;
  if (args.generator == "icosphere") {
    surf = icosphere(args.subdivisions);
  } else if (args.generator == "spheroid") {
    info.parameters["ratio"] = args.ratio;
    surf = spheroid(args.ratio, args.subdivisions);
  } else if (args.generator == "dumbbell") {
    info.parameters["neck"] = args.neck;
    DumbbellProfile prof = dumbbell_profile(args.neck);
    surf = dumbbell(args.neck, args.subdivisions);
    info.parameters["profile_scale"] = prof.scale;
    info.parameters["profile_z0"] = prof.z0;
    info.parameters["profile_b"] = prof.b;
    info.parameters["profile_z_end"] = prof.z_end;
  } else {
    throw ValidationError("unknown generator '" + args.generator + "'");
  }
  info.parameters["subdivisions"] = args.subdivisions;
  return surf;
}

void add_report_flags(CLI::App* cmd, ReportOptions& opts, bool& no_rescale) {
  cmd->add_option("--k-max", opts.k_max, "largest frame size diagnosed");
  cmd->add_option("--eta", opts.etas, "band thresholds for the equator blocks");
  cmd->add_option("--outer-eta-factor", opts.outer_eta_factor,
                  "outer band threshold as a multiple of eta");
  cmd->add_option("--seed", opts.seed, "master seed for every sampled diagnostic");
  cmd->add_option("--eigen-count", opts.eigen_count, "eigenpairs to compute");
  cmd->add_option("--residual-pairs", opts.residual_pairs,
                  "sampled pairs for the geodesic residual distribution");
  cmd->add_option("--excess-pairs", opts.excess_pairs, "sampled pairs for the excess");
  cmd->add_flag("--force", opts.force,
                "diagnose even when the minimum curvature is not positive");
  cmd->add_flag("--no-rescale", no_rescale, "skip rescaling to minimum curvature 1");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    size_t colon = token.find(':');
    try {
      if (colon == std::string::npos) {
        grid.push_back(std::stod(token));
        continue;
      }
      size_t colon2 = token.find(':', colon + 1);
      if (colon2 == std::string::npos) {
        throw ValidationError("grid range '" + token + "' needs start:stop:count");
      }
      double start = std::stod(token.substr(0, colon));
      double stop = std::stod(token.substr(colon + 1, colon2 - colon - 1));
      int count = std::stoi(token.substr(colon2 + 1));
      if (count < 2) throw ValidationError("grid range needs at least 2 points");
      for (int i = 0; i < count; ++i) {
        grid.push_back(start + (stop - start) * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
      }
    } catch (const std::invalid_argument&) {
      throw ValidationError("cannot parse grid token '" + token + "'");
    } catch (const std::out_of_range&) {
      throw ValidationError("grid token '" + token + "' out of range");
    }
  }
  if (grid.empty()) throw ValidationError("empty sweep grid");
  return grid;
}

int run_gen(const SurfaceArgs& args, const std::string& out_path) {
  SurfaceInfo info;
  TriSurface surf = build_surface(args, info);
  validate_surface(surf);
  double kmin = angle_defect_curvature(surf).minCoeff();
  bool violated = kmin <= 0.0;
  if (violated) {
    std::cerr << "warning: hypothesis violated: K_min < 0\n";
  }
  if (!out_path.empty()) write_off_file(surf, out_path);
  ordered_json j;
  j["generator"] = info.generator;
  j["parameters"] = info.parameters;
  j["vertices"] = static_cast<int>(surf.vertex_count());
  j["faces"] = static_cast<int>(surf.face_count());
  j["total_area"] = total_area(surf);
  j["min_curvature"] = kmin;
  j["hypothesis_violated"] = violated;
  if (out_path.empty()) {
    j["output"] = nullptr;
  } else {
    j["output"] = out_path;
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_diagnose(const std::string& input, const SurfaceArgs& gen_args,
                 const ReportOptions& opts, const std::string& out_path,
                 const std::string& spectrum_out) {
  SurfaceInfo info;
  TriSurface surf;
  if (!input.empty()) {
    surf = read_off_file(input);
    info.generator = "off-file";
    info.parameters = ordered_json::object();
    info.parameters["path"] = input;
  } else if (!gen_args.generator.empty()) {
    surf = build_surface(gen_args, info);
  } else {
    throw ValidationError("diagnose needs --input or --generator");
  }
  DiagnoseResult result = diagnose(surf, info, opts);
  if (!spectrum_out.empty()) {
    ordered_json sj;
    to_json(sj, result.spectrum);
    write_json_atomic(sj, spectrum_out);
  }
  if (out_path.empty()) {
    std::cout << result.report.dump(2) << "\n";
  } else {
    write_json_atomic(result.report, out_path);
    ordered_json status;
    status["ok"] = true;
    status["output"] = out_path;
    status["hypothesis_violated"] = result.hypothesis_violated;
    std::cout << status.dump() << "\n";
  }
  return 0;
}

int run_sweep_cmd(SweepOptions opts, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  SweepResult result = run_sweep(opts);
  fs::path dir(out_dir);
  for (size_t i = 0; i < result.reports.size(); ++i) {
    write_json_atomic(result.reports[i], (dir / (result.report_names[i] + ".json")).string());
  }
  write_text_atomic(result.csv, (dir / "sweep.csv").string());
  write_json_atomic(result.summary, (dir / "summary.json").string());
  std::cout << result.summary["trends"].dump() << "\n";
  return 0;
}

int run_ode(const std::string& path, const std::string& mode, double a, double b) {
  Profile1D p = read_profile_csv(path);
  CompareResult r;
  if (mode == "cauchy") {
    r = compare_cauchy(p, a, b);
  } else {
    r = compare_boundary(p, a, b);
  }
  ordered_json j;
  j["mode"] = mode;
  j["a"] = a;
  j["b"] = b;
  j["length"] = p.length();
  j["samples"] = static_cast<int>(p.values.size());
  j["sup_value"] = r.sup_value;
  j["sup_derivative"] = r.sup_derivative;
  j["epsilon"] = r.epsilon;
  j["eta"] = r.eta;
  j["bound"] = r.bound;
  j["bound_ok"] = r.bound_ok;
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral and metric diagnostics for closed positively curved surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "TOML config; command-line flags take precedence");

  SurfaceArgs gen_args;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a surface and write it as OFF");
  add_surface_flags(gen, gen_args, /*as_flag=*/false);
  gen->add_option("-o,--output", gen_out, "OFF output path (omit to only print the summary)");

  std::string diag_input, diag_out, diag_spectrum_out;
  SurfaceArgs diag_gen;
  ReportOptions diag_opts;
  bool diag_no_rescale = false;
  CLI::App* diag = app.add_subcommand("diagnose", "Run the full diagnostic report");
  diag->add_option("-i,--input", diag_input, "OFF mesh to diagnose");
  add_surface_flags(diag, diag_gen, /*as_flag=*/true);
  add_report_flags(diag, diag_opts, diag_no_rescale);
  diag->add_option("-o,--output", diag_out, "report JSON path (omit to print)");
  diag->add_option("--spectrum-out", diag_spectrum_out, "also write the spectrum as JSON");

  SweepOptions sweep_opts;
  std::string sweep_grid_text, sweep_out_dir;
  bool sweep_no_rescale = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Diagnose a family of surfaces over a grid");
  sweep->add_option("--generator", sweep_opts.generator, "spheroid or dumbbell")
      ->check(CLI::IsMember({"spheroid", "dumbbell"}));
  sweep->add_option("--param", sweep_opts.parameter,
                    "swept parameter: ratio (spheroid) or neck (dumbbell)");
  sweep->add_option("--grid", sweep_grid_text,
                    "comma list of values and/or start:stop:count ranges")
      ->required();
  sweep->add_option("--subdiv", sweep_opts.subdivisions, "icosahedron refinement level");
  add_report_flags(sweep, sweep_opts.report, sweep_no_rescale);
  sweep->add_option("--out-dir", sweep_out_dir, "directory for reports, CSV, and summary")
      ->required();

  std::string ode_path, ode_mode;
  double ode_a = 0.0, ode_b = 0.0;
  CLI::App* ode = app.add_subcommand("ode", "Compare a sampled profile against a cos/sin solution");
  ode->add_option("profile", ode_path, "two-column CSV t,v on a uniform grid")->required();
  ode->add_option("--mode", ode_mode, "cauchy or boundary")
      ->required()
      ->check(CLI::IsMember({"cauchy", "boundary"}));
  ode->add_option("-a", ode_a, "u(0)");
  ode->add_option("-b", ode_b, "u'(0) in cauchy mode, u(l) in boundary mode");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return run_gen(gen_args, gen_out);
    if (diag->parsed()) {
      diag_opts.rescale = !diag_no_rescale;
      if (!diag_input.empty() && !diag_gen.generator.empty()) {
        throw ValidationError("pass either --input or --generator, not both");
      }
      return run_diagnose(diag_input, diag_gen, diag_opts, diag_out, diag_spectrum_out);
    }
    if (sweep->parsed()) {
      sweep_opts.report.rescale = !sweep_no_rescale;
      if (sweep_opts.parameter.empty()) {
        sweep_opts.parameter = sweep_opts.generator == "spheroid" ? "ratio" : "neck";
      }
      sweep_opts.grid = parse_grid(sweep_grid_text);
      return run_sweep_cmd(sweep_opts, sweep_out_dir);
    }
    if (ode->parsed()) return run_ode(ode_path, ode_mode, ode_a, ode_b);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericGuard& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
