#include "nlgb/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "nlgb/error.hpp"

namespace nlgb {

RunRecord execute_run(const SimConfig& config, const RunOptions& options) {
  RunRecord record;
  record.config = config;
  record.options = options;
  SolitonTracker left(Side::Left, options.halfwidth), right(Side::Right, options.halfwidth);
  record.norm_defect.reserve(static_cast<std::size_t>(config.steps) + 1);
  record.sigma_over_t.reserve(static_cast<std::size_t>(config.steps));

  evolve_each(config, [&](const SpinorField& field) {
    if (!field.is_finite()) throw Error(ErrorCode::Numeric, "non-finite amplitude at t = " + std::to_string(field.t));
    const ProbabilityDist dist = probability(field);
    record.norm_defect.push_back(std::abs(dist.total() - 1.0));
    left.observe(dist);
    right.observe(dist);
    if (field.t > 0) record.sigma_over_t.push_back({field.t, sigma(dist) / static_cast<double>(field.t)});
    if (options.keep_snapshots && is_recorded(field.t, config)) record.snapshots.push_back(crop_to_support(field));
  });
  record.left = std::move(left).release();
  record.right = std::move(right).release();
  return record;
}

RunAnalysis analyze(const RunRecord& record) {
  RunAnalysis analysis;
  const auto& opts = record.options.classify;
  try {
    analysis.classification = classify_phase(record.left, record.right, record.config.steps, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    analysis.classification = {};
    analysis.collision_note = e.what();
    return analysis;
  }
  analysis.t_col = collision_time(record.left, record.right, opts.collision);
  try {
    analysis.collision = detect_collision(record.left, record.right, opts.collision);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    analysis.collision_note = e.what();
  }
  return analysis;
}

namespace {

std::int64_t stride_for(std::size_t n, std::size_t max_points) {
  if (max_points == 0 || n <= max_points) return 1;
  return static_cast<std::int64_t>((n + max_points - 1) / max_points);
}

std::vector<TrackSample> downsample(const SolitonTrack& track, std::int64_t stride) {
  std::vector<TrackSample> out;
  for (const auto& s : track.series)
    if (s.valid && s.t % stride == 0) out.push_back(s);
  return out;
}

}  // namespace

RunSummary summarize(const RunRecord& record, const RunAnalysis& analysis, std::size_t max_points) {
  RunSummary s;
  s.config = record.config;
  s.halfwidth = record.options.halfwidth;
  s.phase = analysis.classification.label;
  s.track_stride = stride_for(record.right.series.size(), max_points);
  s.right_track = downsample(record.right, s.track_stride);
  s.left_track = downsample(record.left, s.track_stride);
  s.collision = analysis.collision;
  s.t_col = analysis.t_col;
  s.sigma_stride = stride_for(record.sigma_over_t.size(), max_points);
  for (const auto& x : record.sigma_over_t)
    if (x.t % s.sigma_stride == 0) s.sigma_over_t.push_back(x);
  return s;
}

std::vector<ProbabilityDist> recorded_distributions(const RunRecord& record) {
  std::vector<ProbabilityDist> out;
  out.reserve(record.snapshots.size());
  for (const auto& f : record.snapshots) out.push_back(probability(f));
  return out;
}

std::vector<std::string> write_run_artifacts(const std::filesystem::path& dir, const RunRecord& record,
                                             const RunAnalysis& analysis, double wall_time_s) {
  const std::string config = config_json(record.config);
  const auto dists = recorded_distributions(record);
  std::vector<std::string> written;

  write_distribution_csv(dir / "distribution.csv", dists, config);
  written.push_back("distribution.csv");
  try {
    write_density_grid(dir / "density.txt", dists, config);
    written.push_back("density.txt");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
  }
  write_text_file(dir / "tracks.csv", tracks_csv(record.left, record.right, config));
  written.push_back("tracks.csv");
  write_summary_json(dir / "summary.json", summarize(record, analysis));
  written.push_back("summary.json");

  RunManifest manifest;
  manifest.config = record.config;
  manifest.halfwidth = record.options.halfwidth;
  manifest.artifacts = written;
  manifest.wall_time_s = wall_time_s;
  manifest.platform = platform_note();
  write_manifest(dir / "manifest.json", manifest);
  written.push_back("manifest.json");
  return written;
}

std::vector<double> alpha_grid(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step))
    throw Error(ErrorCode::InvalidArgument, "alpha range must be finite");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha step must be > 0");
  if (to < from) throw Error(ErrorCode::InvalidArgument, "alpha range is empty");
  const auto n = static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9)) + 1;
  if (n > 1000000) throw Error(ErrorCode::InvalidArgument, "alpha range has too many points");
  std::vector<double> out;
  for (std::int64_t k = 0; k < n; ++k) {
    const double a = from + static_cast<double>(k) * step;
    out.push_back(std::round(a * 1e12) / 1e12);
  }
  return out;
}

std::string sweep_summary_name(double alpha) { return "run_alpha_" + format_double(alpha) + ".json"; }

SweepResult run_sweep(const SimConfig& base, const std::vector<double>& alphas, const RunOptions& options,
                      int jobs) {
  if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one alpha");
  base.validate();
  SweepResult result;
  result.entries.resize(alphas.size());
  result.summaries.resize(alphas.size());

  RunOptions member_options = options;
  member_options.keep_snapshots = false;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < alphas.size(); i = next++) {
      try {
        SimConfig config = base;
        config.phase = KerrPhase{alphas[i]};
        const RunRecord record = execute_run(config, member_options);
        const RunAnalysis analysis = analyze(record);
        result.summaries[i] = summarize(record, analysis);
        result.entries[i] = {alphas[i], analysis.t_col, analysis.classification.label, sweep_summary_name(alphas[i])};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::clamp<std::int64_t>(jobs, 1, static_cast<std::int64_t>(alphas.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

void write_sweep_artifacts(const std::filesystem::path& dir, const SimConfig& base, const RunOptions& options,
                           const SweepResult& result, double wall_time_s) {
  RunManifest manifest;
  manifest.config = base;
  manifest.halfwidth = options.halfwidth;
  manifest.wall_time_s = wall_time_s;
  manifest.platform = platform_note();
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    write_summary_json(dir / result.entries[i].summary_file, result.summaries[i]);
    manifest.artifacts.push_back(result.entries[i].summary_file);
    manifest.sweep_alphas.push_back(result.entries[i].alpha);
  }
  write_sweep_index(dir / "sweep_index.csv", result.entries);
  manifest.artifacts.push_back("sweep_index.csv");
  write_manifest(dir / "manifest.json", manifest);
}

std::vector<CollisionPoint> collision_points(const std::vector<SweepEntry>& entries) {
  std::vector<CollisionPoint> points;
  for (const auto& e : entries)
    if (e.t_col && *e.t_col > 0) points.push_back({e.alpha, static_cast<double>(*e.t_col)});
  return points;
}

}  // namespace nlgb
