#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spillover/connectedness.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/error.hpp"
#include "spillover/io.hpp"
#include "spillover/panel.hpp"
#include "spillover/tvp.hpp"

namespace spillover {

struct PipelineInput {
  std::filesystem::path path;
  CsvOptions csv;
};

/// Knobs of the correlation / cointegration / connectedness workflow. The
/// JSON form is documented in docs/pipeline-config.schema.json.
struct PipelineConfig {
  std::vector<PipelineInput> inputs;
  TransformKind default_transform = TransformKind::identity;
  std::vector<std::pair<std::string, TransformKind>> column_transforms;
  bool difference = true;

  std::optional<int> lag;  // empty: choose by BIC up to max_lag
  int max_lag = 4;
  int horizon = 10;
  NpdcSign npdc_sign = NpdcSign::dominance;
  TvpConfig tvp;
  std::optional<int> rolling_window;  // set: rolling OLS windows instead of the filter

  std::optional<int> adf_max_lags;
  Deterministic deterministic = Deterministic::constant;
  int ljung_box_lags = 20;
  double level = 0.05;
  std::optional<Eigen::Index> chow_break_index;  // empty: sample midpoint
  int chow_bootstrap_reps = 399;

  double network_threshold = 0.0;

  std::filesystem::path output_directory = "spillover-out";
  bool record_timings = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Reads a JSON config; relative input paths resolve against the file's
/// directory. Throws DataError for missing inputs, ParameterError otherwise.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(const json& document, const std::filesystem::path& base_dir = {});

/// Canonical JSON of everything that influences results. Inputs enter by file
/// name and content digest; output location, thread count and timing flag
/// are excluded.
json canonical_config(const PipelineConfig& config);
/// 16 hex digits of FNV-1a over the canonical config text.
std::string config_hash(const PipelineConfig& config);

/// Raised when a stage fails; carries the stage name and the CLI exit code
/// (2 data error, 3 numerical failure).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message, int exit_code)
      : Error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

struct PipelineResult {
  std::filesystem::path artifact_dir;
  std::string config_hash;
  json manifest;
};

/// Runs ingest, diagnostics, correlation, cointegration, Chow, static and
/// dynamic connectedness and network export, writing each stage's artifacts
/// under <output_directory>/<config_hash>/ and rewriting manifest.json after
/// every completed stage.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace spillover
