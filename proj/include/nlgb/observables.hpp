#pragma once

// Measured quantities of a walk snapshot: the position distribution, its
// width, and windowed peak observables used to follow solitons.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nlgb/walk.hpp"

namespace nlgb {

inline constexpr int kDefaultHalfwidth = 8;

// P_m = |u_m|^2 + |d_m|^2 over [m_min, m_max]; zero outside.
struct ProbabilityDist {
  std::int64_t t = 0;
  std::int64_t m_min = 0;
  std::vector<double> p;
  std::vector<double> p_u;
  std::vector<double> p_d;

  std::int64_t m_max() const noexcept { return m_min + static_cast<std::int64_t>(p.size()) - 1; }
  bool empty() const noexcept { return p.empty(); }
  double at(std::int64_t m) const noexcept {
    return (m < m_min || m > m_max()) ? 0.0 : p[static_cast<std::size_t>(m - m_min)];
  }
  double total() const noexcept;
};

// Distribution over the field's support, which is the light cone for
// localized initial data.
ProbabilityDist probability(const SpinorField& field);

// Standard deviation of the position.
double sigma(const ProbabilityDist& dist);

// Argmax over [lo, hi] (clipped to the distribution). Ties go to the site with
// the largest |m|. Throws InsufficientData if the region carries no probability.
std::int64_t peak_position(const ProbabilityDist& dist, std::int64_t lo, std::int64_t hi);

// Window [m_peak - halfwidth, m_peak + halfwidth] probability.
double soliton_intensity(const ProbabilityDist& dist, std::int64_t m_peak, int halfwidth = kDefaultHalfwidth);

// Probability-weighted mean position inside the window, normalized by the
// window mass. Throws InsufficientData if the window mass is below 1e-15.
double center_of_mass(const ProbabilityDist& dist, std::int64_t m_peak, int halfwidth = kDefaultHalfwidth);

enum class Side { Left, Right };

struct TrackSample {
  std::int64_t t = 0;
  bool valid = false;  // false: no probability in the search region (a gap)
  std::int64_t m_peak = 0;
  double m_cm = 0.0;
  double intensity = 0.0;
  friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

struct SolitonTrack {
  Side side = Side::Right;
  int halfwidth = kDefaultHalfwidth;
  std::vector<TrackSample> series;
  friend bool operator==(const SolitonTrack&, const SolitonTrack&) = default;
};

// Follows the dominant peak on one side of the origin: the right track
// searches m >= 1, the left track m <= -1.
class SolitonTracker {
 public:
  SolitonTracker(Side side, int halfwidth = kDefaultHalfwidth);
  const TrackSample& observe(const ProbabilityDist& dist);
  const SolitonTrack& track() const noexcept { return track_; }
  SolitonTrack release() && { return std::move(track_); }

 private:
  SolitonTrack track_;
};

std::pair<SolitonTrack, SolitonTrack> track_solitons(std::span<const ProbabilityDist> snapshots,
                                                       int halfwidth = kDefaultHalfwidth);

struct Peak {
  std::int64_t m_peak = 0;
  double m_cm = 0.0;
  double intensity = 0.0;
};

// Peaks whose windows do not overlap, strongest first. A site qualifies when it
// is the maximum of its own window; windows carrying less than
// `min_intensity` are dropped.
std::vector<Peak> find_peaks(const ProbabilityDist& dist, int halfwidth = kDefaultHalfwidth,
                             std::size_t max_count = 8, double min_intensity = 0.0);

}  // namespace nlgb
