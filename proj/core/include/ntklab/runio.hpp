#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ntklab/config.hpp"
#include "ntklab/dynamics.hpp"
#include "ntklab/trainer.hpp"

namespace ntklab::runio {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

/// Shortest decimal that parses back to the same 64-bit float.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);

/// Archive layout (fixed file names inside the run directory):
///   config.toml  -- the exact run configuration, re-runnable
///   meta.toml    -- schema/code version, seed, validity, timing
///   rows.tsv     -- iter, per-task losses, omegas, lambdas (deterministic)
///   timing.tsv   -- per-row cumulative wall time (not reproducible)
///   metrics.tsv  -- final per-task held-out losses
///   decay.tsv    -- optional decay-fit report
struct ArchivePaths {
  static constexpr const char* config = "config.toml";
  static constexpr const char* meta = "meta.toml";
  static constexpr const char* rows = "rows.tsv";
  static constexpr const char* timing = "timing.tsv";
  static constexpr const char* metrics = "metrics.tsv";
  static constexpr const char* decay = "decay.tsv";
};

/// Writes a run archive. Refuses to write into an existing non-empty
/// directory. Returns the archive directory.
std::filesystem::path save_run(const trainer::RunRecord& record,
                               const config::RunConfig& cfg,
                               const std::filesystem::path& dir);

struct LoadedRun {
  trainer::RunRecord record;
  config::RunConfig config;
};

/// Exact reconstruction of a saved run; validates the schema version and
/// reports parse failures with file and line.
LoadedRun load_run(const std::filesystem::path& dir);

void save_decay(const dynamics::DecayReport& report, const std::filesystem::path& dir);
dynamics::DecayReport load_decay(const std::filesystem::path& dir);

enum class PlotKind { loss_curves, eig_trajectories, weight_trajectories, decay_fit };

/// Writes one whitespace-separated columnar file per requested series plus a
/// manifest listing each file's columns. `label` names the series in file
/// names. Missing series raise IoError.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& archive_dir,
                                                 PlotKind kind,
                                                 const std::filesystem::path& out_dir,
                                                 const std::string& label);

} // namespace ntklab::runio
