#include "nlgb/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "nlgb/error.hpp"

namespace nlgb {

namespace {

inline double intensity(Amplitude a) { return a.real() * a.real() + a.imag() * a.imag(); }

struct Window {
  std::int64_t lo;
  std::int64_t hi;
  bool empty() const { return lo > hi; }
};

Window clip(const ProbabilityDist& dist, std::int64_t lo, std::int64_t hi) {
  return {std::max(lo, dist.m_min), std::min(hi, dist.m_max())};
}

void check_halfwidth(int halfwidth) {
  if (halfwidth < 0) throw Error(ErrorCode::InvalidArgument, "halfwidth must be >= 0");
}

}  // namespace

double ProbabilityDist::total() const noexcept { return std::accumulate(p.begin(), p.end(), 0.0); }

ProbabilityDist probability(const SpinorField& field) {
  ProbabilityDist dist;
  dist.t = field.t;
  const std::int64_t lo = std::max(field.m_min, field.support_lo);
  const std::int64_t hi = std::min(field.m_max(), field.support_hi);
  dist.m_min = lo;
  if (hi < lo) return dist;
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  dist.p.resize(n);
  dist.p_u.resize(n);
  dist.p_d.resize(n);
  const std::size_t base = field.index(lo);
  for (std::size_t i = 0; i < n; ++i) {
    dist.p_u[i] = intensity(field.u[base + i]);
    dist.p_d[i] = intensity(field.d[base + i]);
    dist.p[i] = dist.p_u[i] + dist.p_d[i];
  }
  return dist;
}

double sigma(const ProbabilityDist& dist) {
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < dist.p.size(); ++i) {
    const auto m = static_cast<double>(dist.m_min + static_cast<std::int64_t>(i));
    mass += dist.p[i];
    first += m * dist.p[i];
  }
  if (mass <= 0.0) return 0.0;
  const double mean = first / mass;
  double second = 0.0;
  for (std::size_t i = 0; i < dist.p.size(); ++i) {
    const double dm = static_cast<double>(dist.m_min + static_cast<std::int64_t>(i)) - mean;
    second += dm * dm * dist.p[i];
  }
  return std::sqrt(second / mass);
}

std::int64_t peak_position(const ProbabilityDist& dist, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error(ErrorCode::InvalidArgument, "peak search region is empty");
  const Window w = clip(dist, lo, hi);
  std::int64_t best = 0;
  double best_p = 0.0;
  bool found = false;
  for (std::int64_t m = w.lo; m <= w.hi; ++m) {
    const double p = dist.at(m);
    if (p <= 0.0) continue;
    const bool better = !found || p > best_p ||
                        (p == best_p && (std::llabs(m) > std::llabs(best) || (std::llabs(m) == std::llabs(best) && m > best)));
    if (better) {
      best = m;
      best_p = p;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::InsufficientData, "no probability in peak search region");
  return best;
}

double soliton_intensity(const ProbabilityDist& dist, std::int64_t m_peak, int halfwidth) {
  check_halfwidth(halfwidth);
  const Window w = clip(dist, m_peak - halfwidth, m_peak + halfwidth);
  double mass = 0.0;
  for (std::int64_t m = w.lo; m <= w.hi; ++m) mass += dist.at(m);
  return std::clamp(mass, 0.0, 1.0);
}

double center_of_mass(const ProbabilityDist& dist, std::int64_t m_peak, int halfwidth) {
  check_halfwidth(halfwidth);
  const Window w = clip(dist, m_peak - halfwidth, m_peak + halfwidth);
  double mass = 0.0, moment = 0.0;
  for (std::int64_t m = w.lo; m <= w.hi; ++m) {
    mass += dist.at(m);
    moment += static_cast<double>(m) * dist.at(m);
  }
  if (mass < 1e-15) throw Error(ErrorCode::InsufficientData, "no soliton in window");
  return moment / mass;
}

SolitonTracker::SolitonTracker(Side side, int halfwidth) {
  check_halfwidth(halfwidth);
  track_.side = side;
  track_.halfwidth = halfwidth;
}

const TrackSample& SolitonTracker::observe(const ProbabilityDist& dist) {
  TrackSample sample;
  sample.t = dist.t;
  const bool right = track_.side == Side::Right;
  const std::int64_t lo = right ? 1 : std::min<std::int64_t>(dist.m_min, -1);
  const std::int64_t hi = right ? std::max<std::int64_t>(dist.m_max(), 1) : -1;
  try {
    sample.m_peak = peak_position(dist, lo, hi);
    sample.m_cm = center_of_mass(dist, sample.m_peak, track_.halfwidth);
    sample.intensity = soliton_intensity(dist, sample.m_peak, track_.halfwidth);
    sample.valid = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    sample = TrackSample{dist.t};
  }
  track_.series.push_back(sample);
  return track_.series.back();
}

std::pair<SolitonTrack, SolitonTrack> track_solitons(std::span<const ProbabilityDist> snapshots, int halfwidth) {
  SolitonTracker left(Side::Left, halfwidth), right(Side::Right, halfwidth);
  std::int64_t last_t = -1;
  for (const auto& dist : snapshots) {
    if (dist.t <= last_t) throw Error(ErrorCode::InvalidArgument, "snapshots must be strictly time-ordered");
    last_t = dist.t;
    left.observe(dist);
    right.observe(dist);
  }
  return {std::move(left).release(), std::move(right).release()};
}

std::vector<Peak> find_peaks(const ProbabilityDist& dist, int halfwidth, std::size_t max_count,
                             double min_intensity) {
  check_halfwidth(halfwidth);
  std::vector<std::int64_t> candidates;
  for (std::int64_t m = dist.m_min; m <= dist.m_max(); ++m) {
    const double p = dist.at(m);
    if (p <= 0.0) continue;
    bool is_max = true;
    for (std::int64_t k = m - halfwidth; k <= m + halfwidth && is_max; ++k) {
      if (k == m) continue;
      const double q = dist.at(k);
      if (q > p || (q == p && std::llabs(k) > std::llabs(m))) is_max = false;
    }
    if (is_max) candidates.push_back(m);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::int64_t a, std::int64_t b) { return dist.at(a) > dist.at(b); });

  std::vector<Peak> peaks;
  for (std::int64_t m : candidates) {
    if (peaks.size() >= max_count) break;
    const bool overlaps = std::any_of(peaks.begin(), peaks.end(), [&](const Peak& pk) {
      return std::llabs(pk.m_peak - m) <= 2 * static_cast<std::int64_t>(halfwidth);
    });
    if (overlaps) continue;
    const double mass = soliton_intensity(dist, m, halfwidth);
    if (mass < min_intensity) continue;
    peaks.push_back({m, center_of_mass(dist, m, halfwidth), mass});
  }
  return peaks;
}

}  // namespace nlgb
