#pragma once

// End-to-end workflows behind the command line: a single run with its
// observables and analysis, artifact writing, and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlgb/analysis.hpp"
#include "nlgb/io.hpp"

namespace nlgb {

struct RunOptions {
  int halfwidth = kDefaultHalfwidth;
  bool keep_snapshots = true;  // recorded fields, cropped to their support
  ClassifyOptions classify;
};

// Everything a run produces. Tracks and sigma/t cover every step regardless of
// the recording schedule.
struct RunRecord {
  SimConfig config;
  RunOptions options;
  std::vector<SpinorField> snapshots;
  SolitonTrack left;
  SolitonTrack right;
  std::vector<SigmaSample> sigma_over_t;  // t >= 1
  std::vector<double> norm_defect;        // |sum P - 1| at every step
};

RunRecord execute_run(const SimConfig& config, const RunOptions& options = {});

struct RunAnalysis {
  Classification classification;
  std::optional<CollisionEvent> collision;
  std::optional<std::int64_t> t_col;
  std::string collision_note;  // why the collision could not be evaluated, if so
};

RunAnalysis analyze(const RunRecord& record);

// Downsamples tracks and sigma/t to at most `max_points` entries each.
RunSummary summarize(const RunRecord& record, const RunAnalysis& analysis, std::size_t max_points = 1000);

std::vector<ProbabilityDist> recorded_distributions(const RunRecord& record);

// Writes distribution.csv, tracks.csv, summary.json, manifest.json and, when
// the schedule is uniform, density.txt. Returns the artifact names written.
std::vector<std::string> write_run_artifacts(const std::filesystem::path& dir, const RunRecord& record,
                                             const RunAnalysis& analysis, double wall_time_s);

// from, from + step, ... up to `to` (inclusive within 1e-9 of a step), each
// rounded to 12 decimals. Throws InvalidArgument for an empty range.
std::vector<double> alpha_grid(double from, double to, double step);

// File name used for a sweep member, e.g. "run_alpha_0.49.json".
std::string sweep_summary_name(double alpha);

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::vector<RunSummary> summaries;
};

// One Kerr run per alpha on `jobs` worker threads; results are ordered by
// alpha and independent of `jobs`. `base` supplies everything except alpha.
SweepResult run_sweep(const SimConfig& base, const std::vector<double>& alphas, const RunOptions& options,
                      int jobs);

// summary per member plus sweep_index.csv and manifest.json.
void write_sweep_artifacts(const std::filesystem::path& dir, const SimConfig& base, const RunOptions& options,
                           const SweepResult& result, double wall_time_s);

std::vector<CollisionPoint> collision_points(const std::vector<SweepEntry>& entries);

}  // namespace nlgb
