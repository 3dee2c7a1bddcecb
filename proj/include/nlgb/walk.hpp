#pragma once

// Coined walk on the integer line with an optional phase imprint before the coin.
//
// One step maps (u, d) at time t to time t+1 as
//   a_m = u_m e^{i F_u(m,t)},  b_m = d_m e^{i F_d(m,t)}     (phase)
//   (a'_m, b'_m) = C (a_m, b_m)                              (coin)
//   u_{m+1} = a'_m,  d_{m-1} = b'_m                          (shift)
// With the Hadamard coin and the Kerr rule F_c = 2 pi alpha |c_m|^2 this is
//   u_{m,t+1} = (A_{m-1} + B_{m-1}) / sqrt 2,  d_{m,t+1} = (A_{m+1} - B_{m+1}) / sqrt 2.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlgb {

using Amplitude = std::complex<double>;

// Amplitudes on the dense lattice [m_min, m_max]. Sites outside
// [support_lo, support_hi] are identically zero; the support grows by one
// site per step in each direction.
struct SpinorField {
  std::int64_t t = 0;
  std::int64_t m_min = 0;
  std::int64_t support_lo = 0;
  std::int64_t support_hi = 0;
  std::vector<Amplitude> u;
  std::vector<Amplitude> d;

  std::size_t size() const noexcept { return u.size(); }
  std::int64_t m_max() const noexcept { return m_min + static_cast<std::int64_t>(u.size()) - 1; }
  bool contains(std::int64_t m) const noexcept { return m >= m_min && m <= m_max(); }
  std::size_t index(std::int64_t m) const noexcept { return static_cast<std::size_t>(m - m_min); }

  Amplitude up(std::int64_t m) const noexcept { return contains(m) ? u[index(m)] : Amplitude{}; }
  Amplitude down(std::int64_t m) const noexcept { return contains(m) ? d[index(m)] : Amplitude{}; }

  double norm() const noexcept;
  bool is_finite() const noexcept;
};

// 2x2 coin matrix, row-major: [c00 c01; c10 c11] acting on (u, d).
class CoinOp {
 public:
  static CoinOp hadamard();
  // Throws InvalidArgument unless C^dagger C = I to 1e-12 entrywise.
  static CoinOp from_matrix(Amplitude c00, Amplitude c01, Amplitude c10, Amplitude c11);

  const std::array<Amplitude, 4>& entries() const noexcept { return c_; }
  bool is_hadamard() const noexcept { return hadamard_; }
  double unitarity_defect() const noexcept;

  friend bool operator==(const CoinOp&, const CoinOp&) = default;

 private:
  CoinOp(std::array<Amplitude, 4> c, bool hadamard) : c_(c), hadamard_(hadamard) {}
  std::array<Amplitude, 4> c_;
  bool hadamard_;
};

struct NoPhase {
  friend bool operator==(const NoPhase&, const NoPhase&) = default;
};
struct KerrPhase {
  double alpha = 0.0;
  friend bool operator==(const KerrPhase&, const KerrPhase&) = default;
};
struct LinearPhase {
  double phi0 = 0.0;
  friend bool operator==(const LinearPhase&, const LinearPhase&) = default;
};
struct QuadraticPhase {
  double phi0 = 0.0;
  friend bool operator==(const QuadraticPhase&, const QuadraticPhase&) = default;
};
// Arbitrary phase pair (F_u, F_d) as a function of (m, t, |u_m|^2, |d_m|^2).
// Not serializable; equality compares the name only.
struct CustomPhase {
  using Fn = std::function<std::pair<double, double>(std::int64_t m, std::int64_t t, double p_u, double p_d)>;
  std::string name;
  Fn fn;
  friend bool operator==(const CustomPhase& a, const CustomPhase& b) { return a.name == b.name; }
};

using PhaseRule = std::variant<NoPhase, KerrPhase, LinearPhase, QuadraticPhase, CustomPhase>;

struct SymmetricDelta {
  friend bool operator==(const SymmetricDelta&, const SymmetricDelta&) = default;
};
struct UpDelta {
  friend bool operator==(const UpDelta&, const UpDelta&) = default;
};
struct SiteAmplitude {
  std::int64_t m = 0;
  Amplitude u;
  Amplitude d;
  friend bool operator==(const SiteAmplitude&, const SiteAmplitude&) = default;
};
struct CustomInit {
  std::vector<SiteAmplitude> sites;
  friend bool operator==(const CustomInit&, const CustomInit&) = default;
};

using InitialCondition = std::variant<SymmetricDelta, UpDelta, CustomInit>;

struct SimConfig {
  PhaseRule phase = NoPhase{};
  CoinOp coin = CoinOp::hadamard();
  InitialCondition init = SymmetricDelta{};
  std::int64_t steps = 300;
  std::int64_t record_every = 1;

  // Throws InvalidArgument on negative steps or record_every < 1.
  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline constexpr double kNormTolerance = 1e-12;

std::string phase_name(const PhaseRule& rule);
std::string init_name(const InitialCondition& init);

// Field at t = 0 on the lattice [lo - steps - 1, hi + steps + 1], where [lo, hi]
// is the initial support ([0, 0] for the delta conditions). Throws
// Normalization if the initial norm differs from 1 by more than 1e-12.
SpinorField make_initial(const InitialCondition& init, std::int64_t steps);

// Multiplies each component by e^{i F_c(m, t)}. All phases are evaluated from
// the input amplitudes.
SpinorField apply_phase(SpinorField field, const PhaseRule& rule);

// Advances `in` by one step into `out` (resized as needed). Throws Bounds if
// the new support would leave the lattice.
void step_into(const SpinorField& in, SpinorField& out, const SimConfig& config);
SpinorField step(const SpinorField& field, const SimConfig& config);

// True for t = 0, every record_every-th step, and t = steps.
bool is_recorded(std::int64_t t, const SimConfig& config) noexcept;

// Calls `visit` with the field at every t in [0, steps], in order.
void evolve_each(const SimConfig& config, const std::function<void(const SpinorField&)>& visit);

// Snapshots at the recording schedule.
std::vector<SpinorField> evolve(const SimConfig& config);

// Copy of `field` restricted to its support (plus one padding site on each side).
SpinorField crop_to_support(const SpinorField& field);

}  // namespace nlgb
