#pragma once

// Test-only helpers: an independent full-lattice walk and synthetic tracks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "nlgb/observables.hpp"

namespace nlgb::testing {

// Nested-loop evaluation of the Hadamard-Kerr recursion on [-T-1, T+1] with
// fresh arrays every step; no support tracking, no fast paths.
struct NaiveWalk {
  std::int64_t T;
  std::vector<std::complex<double>> u, d;

  NaiveWalk(std::int64_t steps, std::complex<double> u0, std::complex<double> d0)
      : T(steps), u(static_cast<std::size_t>(2 * steps + 3)), d(static_cast<std::size_t>(2 * steps + 3)) {
    u[idx(0)] = u0;
    d[idx(0)] = d0;
  }

  std::size_t idx(std::int64_t m) const { return static_cast<std::size_t>(m + T + 1); }
  std::complex<double> up(std::int64_t m) const { return u[idx(m)]; }
  std::complex<double> down(std::int64_t m) const { return d[idx(m)]; }

  void advance(double alpha) {
    const double s = std::numbers::sqrt2 / 2.0;
    const std::complex<double> I(0.0, 1.0);
    std::vector<std::complex<double>> A(u.size()), B(u.size()), nu(u.size()), nd(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      A[k] = u[k] * std::exp(I * (2.0 * std::numbers::pi * alpha * std::norm(u[k])));
      B[k] = d[k] * std::exp(I * (2.0 * std::numbers::pi * alpha * std::norm(d[k])));
    }
    for (std::size_t k = 1; k + 1 < u.size(); ++k) {
      nu[k] = s * (A[k - 1] + B[k - 1]);
      nd[k] = s * (A[k + 1] - B[k + 1]);
    }
    u.swap(nu);
    d.swap(nd);
  }
};

// Distribution with the given site probabilities; p_u carries everything.
inline ProbabilityDist dist_from(std::int64_t m_min, std::vector<double> p, std::int64_t t = 0) {
  ProbabilityDist dist;
  dist.t = t;
  dist.m_min = m_min;
  dist.p_u = p;
  dist.p_d.assign(p.size(), 0.0);
  dist.p = std::move(p);
  return dist;
}

inline SolitonTrack synthetic_track(Side side, std::int64_t steps, const std::function<double(std::int64_t)>& m_cm,
                                    double intensity = 0.3) {
  SolitonTrack track;
  track.side = side;
  for (std::int64_t t = 0; t <= steps; ++t) {
    const double m = m_cm(t);
    track.series.push_back({t, true, static_cast<std::int64_t>(std::lround(m)), m, intensity});
  }
  return track;
}

}  // namespace nlgb::testing

#include <filesystem>
#include <random>
#include <string>

namespace nlgb::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("nlgb_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nlgb::testing
