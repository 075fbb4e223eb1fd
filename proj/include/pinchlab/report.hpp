#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pinchlab/equator.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/surface.hpp"

namespace pinchlab {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct ReportOptions {
  int k_max = 3;                          // frame/band orders 1..k_max
  std::vector<double> etas = {0.05, 0.1, 0.2};
  double outer_eta_factor = 3.0;          // convexity ambient band = factor * eta
  std::uint64_t seed = 42;
  int eigen_count = 9;
  int residual_pairs = 100;               // along-path residual sampling
  int excess_pairs = 10;                  // random excess pairs
  EquatorSamples equator_samples{};
  bool rescale = true;                    // scale so min curvature = 1
  bool force = false;                     // keep going when min curvature <= 0
};

// Generator provenance recorded in the report; "off-file" for loaded meshes.
struct SurfaceInfo {
  std::string generator = "off-file";
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
};

struct DiagnoseResult {
  nlohmann::ordered_json report;
  bool hypothesis_violated = false;
  Spectrum spectrum;  // normalized spectrum of the diagnosed (rescaled) surface
};

// Runs every diagnostic on one surface and assembles the full report.
// Deterministic for a fixed seed up to the provenance timestamp.
DiagnoseResult diagnose(const TriSurface& input, const SurfaceInfo& info,
                        const ReportOptions& opts);

struct SweepOptions {
  std::string generator = "spheroid";     // spheroid | dumbbell
  std::string parameter = "ratio";        // ratio | neck
  std::vector<double> grid;               // >= 3 strictly increasing values
  int subdivisions = 3;
  ReportOptions report{};
};

struct SweepResult {
  nlohmann::ordered_json summary;                 // grid, per-point status, trends
  std::string csv;                                // one row per successful point
  std::vector<nlohmann::ordered_json> reports;    // per successful point, grid order
  std::vector<std::string> report_names;          // file stems, parallel to reports
};

SweepResult run_sweep(const SweepOptions& opts);

// Serializes with a trailing newline and writes through a temp file + rename.
void write_json_atomic(const nlohmann::ordered_json& j, const std::string& path);
void write_text_atomic(const std::string& text, const std::string& path);

}  // namespace pinchlab
