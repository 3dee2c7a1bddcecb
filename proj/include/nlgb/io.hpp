#pragma once

// On-disk formats. Every artifact names its format version; numbers are written
// in the shortest decimal form that round-trips to the same double.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlgb/analysis.hpp"
#include "nlgb/observables.hpp"
#include "nlgb/walk.hpp"

namespace nlgb {

inline constexpr const char* kDistributionFormat = "nlgb.distribution.v1";
inline constexpr const char* kDensityGridFormat = "nlgb.density-grid.v1";
inline constexpr const char* kSummarySchema = "nlgb.summary.v1";
inline constexpr const char* kManifestSchema = "nlgb.manifest.v1";
inline constexpr const char* kSweepIndexFormat = "nlgb.sweep-index.v1";

// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_double(double value);
double parse_double(const std::string& text);

// --- distributions -------------------------------------------------------

struct DistributionRow {
  std::int64_t t = 0;
  std::int64_t m = 0;
  double p = 0.0;
  double p_u = 0.0;
  double p_d = 0.0;
};

// `t,m,p,p_u,p_d` rows sorted by (t, m), one per site of each distribution's
// range (the light cone), so parity zeros appear explicitly.
// A non-empty `config` is embedded as a "# config: ..." comment line.
std::string distribution_csv(std::span<const ProbabilityDist> series, const std::string& config = {});
void write_distribution_csv(const std::filesystem::path& path, std::span<const ProbabilityDist> series,
                            const std::string& config = {});
std::vector<DistributionRow> read_distribution_csv(const std::filesystem::path& path);

// --- density grid --------------------------------------------------------

struct DensityGrid {
  std::vector<std::int64_t> t;  // columns
  std::vector<std::int64_t> m;  // rows, descending
  std::vector<std::vector<double>> cells;  // cells[row][column] = P_m(t)
};

// Rows are lattice sites (descending), columns recorded steps. Throws
// InvalidArgument unless the steps are uniformly spaced.
std::string density_grid(std::span<const ProbabilityDist> series, const std::string& config = {});
void write_density_grid(const std::filesystem::path& path, std::span<const ProbabilityDist> series,
                        const std::string& config = {});

// --- tracks --------------------------------------------------------------

inline constexpr const char* kTracksFormat = "nlgb.tracks.v1";

// `t,side,m_peak,m_cm,intensity` for every valid sample, left track first.
std::string tracks_csv(const SolitonTrack& left, const SolitonTrack& right, const std::string& config = {});
DensityGrid read_density_grid(const std::filesystem::path& path);

// --- configuration -------------------------------------------------------

// JSON object text for a configuration and its inverse. Custom phase rules
// serialize by name only and cannot be parsed back (Parse error).
std::string config_json(const SimConfig& config);
SimConfig parse_config_json(const std::string& text);

// Whitespace-separated `m u_re u_im d_re d_im` lines; '#' starts a comment.
CustomInit read_init_file(const std::filesystem::path& path);

struct RunManifest {
  SimConfig config;
  int halfwidth = kDefaultHalfwidth;
  std::vector<std::string> artifacts;
  std::string format_version = kManifestSchema;
  double wall_time_s = 0.0;
  std::string platform;
  std::vector<double> sweep_alphas;  // empty for a single run
};

std::string manifest_json(const RunManifest& manifest);
RunManifest parse_manifest_json(const std::string& text);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);
std::string platform_note();

// --- run summary ---------------------------------------------------------

struct SigmaSample {
  std::int64_t t = 0;
  double sigma_over_t = 0.0;
  friend bool operator==(const SigmaSample&, const SigmaSample&) = default;
};

struct RunSummary {
  SimConfig config;
  int halfwidth = kDefaultHalfwidth;
  PhaseLabel phase;
  std::int64_t track_stride = 1;
  std::vector<TrackSample> right_track;  // valid samples every track_stride steps
  std::vector<TrackSample> left_track;
  std::optional<CollisionEvent> collision;
  std::optional<std::int64_t> t_col;
  std::int64_t sigma_stride = 1;
  std::vector<SigmaSample> sigma_over_t;
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

// "alpha" for the fit input, nullopt unless the phase rule is Kerr.
std::optional<double> kerr_alpha(const SimConfig& config);

// Keys in fixed order: schema, config, halfwidth, phase, [behavior, m_eq],
// tracks, [collision], sigma_over_t, fit_input.
std::string summary_json(const RunSummary& summary);
RunSummary parse_summary_json(const std::string& text);
void write_summary_json(const std::filesystem::path& path, const RunSummary& summary);
RunSummary read_summary_json(const std::filesystem::path& path);

// --- sweep index ---------------------------------------------------------

struct SweepEntry {
  double alpha = 0.0;
  std::optional<std::int64_t> t_col;
  PhaseLabel phase;
  std::string summary_file;
  friend bool operator==(const SweepEntry&, const SweepEntry&) = default;
};

// `alpha,t_col,phase,behavior,summary`; an empty t_col means no collision.
std::string sweep_index_csv(std::span<const SweepEntry> entries);
void write_sweep_index(const std::filesystem::path& path, std::span<const SweepEntry> entries);
std::vector<SweepEntry> read_sweep_index(const std::filesystem::path& path);

// Writes `contents` to `path`, creating parent directories. Throws Io.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace nlgb
