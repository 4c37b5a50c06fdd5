#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ciiq/features.hpp"
#include "ciiq/logistic.hpp"
#include "ciiq/scaling.hpp"

namespace ciiq {

struct ManifestRow {
  std::string ref_path;
  std::string dist_path;
  double mos = 0.0;
  std::string tag;
};

/// Rows of (reference, distorted, subjective score, distortion tag).
struct DatasetManifest {
  std::string name;
  std::vector<ManifestRow> rows;
};

/// Parse the canonical CSV (header `ref,dist,mos,tag`). Relative paths are
/// resolved against the manifest's directory. Throws IoError with the row
/// number on parse failures; missing files are listed exhaustively.
DatasetManifest load_manifest(const std::string& path);

/// Correlations for the rows sharing one distortion tag. Rank statistics
/// are computed on raw scores within the group; plcc/rmse reuse the
/// dataset-level logistic mapping.
struct TagReport {
  std::string tag;
  size_t n_pairs = 0;
  bool degenerate = false;
  double srcc = 0.0;
  double krcc = 0.0;
  double plcc = 0.0;
  double rmse = 0.0;
};

struct CorrelationReport {
  std::string dataset;
  size_t n_pairs = 0;
  size_t n_failed = 0;
  bool degenerate = false;  // correlations undefined (constant scores, <2 rows)
  double srcc = 0.0;
  double krcc = 0.0;
  double plcc = 0.0;
  double rmse = 0.0;
  std::optional<double> plcc_raw;  // PLCC on unmapped scores, when requested
  LogisticFit logistic;
  ScalingParams params;
  std::vector<TagReport> tags;        // filled when EvaluateOptions::per_tag
  std::vector<std::string> failures;  // one message per failed row
  std::vector<double> scores;         // objective score per successful row
  std::vector<double> mos;            // matching subjective scores
};

struct EvaluateOptions {
  int jobs = 1;
  bool plcc_raw = false;
  bool per_tag = false;
};

/// Score every manifest row, fit the logistic mapping and compute the
/// correlation suite. Rank correlations use raw objective scores; PLCC and
/// RMSE use logistic-mapped scores. Per-row failures are collected rather
/// than aborting the run.
CorrelationReport evaluate_dataset(const DatasetManifest& manifest,
                                   const ScalingParams& params,
                                   const EvaluateOptions& opts = {});

struct SweepCell {
  double k1 = 0.0;
  double k2 = 0.0;
  CorrelationReport report;
};

struct SweepGrid {
  std::vector<double> k1_values;
  std::vector<double> k2_values;
  std::vector<SweepCell> cells;  // complete grid, k1-major
};

SweepGrid sweep_parameters(const DatasetManifest& manifest,
                           const std::vector<double>& k1_values,
                           const std::vector<double>& k2_values,
                           const ScalingParams& base,
                           const EvaluateOptions& opts = {});

/// One evaluate_dataset run per mode: center-surround plus each single
/// window size.
std::vector<CorrelationReport> ablate_window(const DatasetManifest& manifest,
                                             const std::vector<int>& windows,
                                             const ScalingParams& base,
                                             const EvaluateOptions& opts = {});

/// Round to 6 significant digits; all serialized numbers go through this so
/// reports stay diff-stable.
double round6(double v);

/// Report serializers used by the CLI and the acceptance suite.
std::string report_to_json(const CorrelationReport& report);
std::string sweep_to_csv(const SweepGrid& grid);

}  // namespace ciiq
