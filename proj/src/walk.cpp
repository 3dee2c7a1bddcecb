#include "nlgb/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlgb/error.hpp"

namespace nlgb {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

inline Amplitude unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double intensity(Amplitude a) { return a.real() * a.real() + a.imag() * a.imag(); }

}  // namespace

double SpinorField::norm() const noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += intensity(u[i]) + intensity(d[i]);
  return total;
}

bool SpinorField::is_finite() const noexcept {
  auto finite = [](Amplitude a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); };
  return std::all_of(u.begin(), u.end(), finite) && std::all_of(d.begin(), d.end(), finite);
}

CoinOp CoinOp::hadamard() {
  return CoinOp({Amplitude{kInvSqrt2}, Amplitude{kInvSqrt2}, Amplitude{kInvSqrt2}, Amplitude{-kInvSqrt2}}, true);
}

CoinOp CoinOp::from_matrix(Amplitude c00, Amplitude c01, Amplitude c10, Amplitude c11) {
  CoinOp coin({c00, c01, c10, c11}, false);
  if (coin.c_ == hadamard().c_) return hadamard();
  if (!(coin.unitarity_defect() <= kNormTolerance)) {
    std::ostringstream msg;
    msg << "coin matrix is not unitary (max |C^dagger C - I| = " << coin.unitarity_defect() << ")";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  return coin;
}

double CoinOp::unitarity_defect() const noexcept {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      // (C^dagger C)_{ij} = sum_k conj(C_{ki}) C_{kj}
      Amplitude s = std::conj(c_[i]) * c_[j] + std::conj(c_[2 + i]) * c_[2 + j];
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

void SimConfig::validate() const {
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  if (record_every < 1) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
  if (!(coin.unitarity_defect() <= kNormTolerance)) throw Error(ErrorCode::InvalidArgument, "coin is not unitary");
  std::visit(Overloaded{
                 [](const KerrPhase& k) {
                   if (!std::isfinite(k.alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
                 },
                 [](const LinearPhase& p) {
                   if (!std::isfinite(p.phi0)) throw Error(ErrorCode::InvalidArgument, "phi0 must be finite");
                 },
                 [](const QuadraticPhase& p) {
                   if (!std::isfinite(p.phi0)) throw Error(ErrorCode::InvalidArgument, "phi0 must be finite");
                 },
                 [](const CustomPhase& c) {
                   if (!c.fn) throw Error(ErrorCode::InvalidArgument, "custom phase rule has no function");
                 },
                 [](const NoPhase&) {},
             },
             phase);
}

std::string phase_name(const PhaseRule& rule) {
  return std::visit(Overloaded{
                        [](const NoPhase&) { return std::string("none"); },
                        [](const KerrPhase&) { return std::string("kerr"); },
                        [](const LinearPhase&) { return std::string("linear"); },
                        [](const QuadraticPhase&) { return std::string("quadratic"); },
                        [](const CustomPhase&) { return std::string("custom"); },
                    },
                    rule);
}

std::string init_name(const InitialCondition& init) {
  return std::visit(Overloaded{
                        [](const SymmetricDelta&) { return std::string("symmetric"); },
                        [](const UpDelta&) { return std::string("updelta"); },
                        [](const CustomInit&) { return std::string("custom"); },
                    },
                    init);
}

SpinorField make_initial(const InitialCondition& init, std::int64_t steps) {
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");

  std::vector<SiteAmplitude> sites = std::visit(
      Overloaded{
          [](const SymmetricDelta&) {
            return std::vector<SiteAmplitude>{{0, Amplitude{kInvSqrt2, 0.0}, Amplitude{0.0, kInvSqrt2}}};
          },
          [](const UpDelta&) { return std::vector<SiteAmplitude>{{0, Amplitude{1.0}, Amplitude{}}}; },
          [](const CustomInit& c) { return c.sites; },
      },
      init);
  if (sites.empty()) throw Error(ErrorCode::Normalization, "initial condition has no sites");

  std::int64_t lo = sites.front().m, hi = sites.front().m;
  double total = 0.0;
  for (const auto& s : sites) {
    if (!std::isfinite(s.u.real()) || !std::isfinite(s.u.imag()) || !std::isfinite(s.d.real()) ||
        !std::isfinite(s.d.imag()))
      throw Error(ErrorCode::Normalization, "initial amplitudes must be finite");
    lo = std::min(lo, s.m);
    hi = std::max(hi, s.m);
    total += intensity(s.u) + intensity(s.d);
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "initial condition is not normalized (norm = " << total << ")";
    throw Error(ErrorCode::Normalization, msg.str());
  }

  SpinorField field;
  field.t = 0;
  field.m_min = lo - steps - 1;
  const auto n = static_cast<std::size_t>(hi - lo + 2 * steps + 3);
  field.u.assign(n, Amplitude{});
  field.d.assign(n, Amplitude{});
  field.support_lo = lo;
  field.support_hi = hi;
  for (const auto& s : sites) {
    // Repeated sites accumulate, matching a superposition of the listed terms.
    field.u[field.index(s.m)] += s.u;
    field.d[field.index(s.m)] += s.d;
  }
  if (std::abs(field.norm() - 1.0) > kNormTolerance)
    throw Error(ErrorCode::Normalization, "initial condition is not normalized after merging repeated sites");
  return field;
}

namespace {

// Phase factors (e^{iF_u}, e^{iF_d}) at site m for the current field.
struct PhaseEval {
  const PhaseRule& rule;
  std::int64_t t;

  std::pair<Amplitude, Amplitude> operator()(std::int64_t m, Amplitude u, Amplitude d) const {
    return std::visit(
        Overloaded{
            [](const NoPhase&) { return std::pair{Amplitude{1.0}, Amplitude{1.0}}; },
            [&](const KerrPhase& k) {
              const double scale = 2.0 * std::numbers::pi * k.alpha;
              return std::pair{unit_phase(scale * intensity(u)), unit_phase(scale * intensity(d))};
            },
            [&](const LinearPhase& p) {
              const Amplitude f = unit_phase(static_cast<double>(m) * p.phi0);
              return std::pair{f, f};
            },
            [&](const QuadraticPhase& p) {
              const auto mm = static_cast<double>(m);
              const Amplitude f = unit_phase(mm * mm * p.phi0);
              return std::pair{f, f};
            },
            [&](const CustomPhase& c) {
              auto [fu, fd] = c.fn(m, t, intensity(u), intensity(d));
              return std::pair{unit_phase(fu), unit_phase(fd)};
            },
        },
        rule);
  }
};

}  // namespace

SpinorField apply_phase(SpinorField field, const PhaseRule& rule) {
  if (std::holds_alternative<NoPhase>(rule)) return field;
  const PhaseEval eval{rule, field.t};
  // Each site's phase depends only on that site, so the in-place update reads
  // every input before overwriting it.
  for (std::size_t i = 0; i < field.size(); ++i) {
    const std::int64_t m = field.m_min + static_cast<std::int64_t>(i);
    auto [fu, fd] = eval(m, field.u[i], field.d[i]);
    field.u[i] *= fu;
    field.d[i] *= fd;
  }
  return field;
}

void step_into(const SpinorField& in, SpinorField& out, const SimConfig& config) {
  const std::int64_t lo = in.support_lo - 1;
  const std::int64_t hi = in.support_hi + 1;
  if (lo < in.m_min || hi > in.m_max()) {
    std::ostringstream msg;
    msg << "step " << in.t << " -> " << in.t + 1 << " leaves lattice [" << in.m_min << ", " << in.m_max() << "]";
    throw Error(ErrorCode::Bounds, msg.str());
  }

  out.t = in.t + 1;
  out.m_min = in.m_min;
  out.support_lo = lo;
  out.support_hi = hi;
  out.u.resize(in.size());
  out.d.resize(in.size());
  const std::size_t ilo = in.index(lo), ihi = in.index(hi);
  std::fill(out.u.begin() + ilo, out.u.begin() + ihi + 1, Amplitude{});
  std::fill(out.d.begin() + ilo, out.d.begin() + ihi + 1, Amplitude{});

  const PhaseEval eval{config.phase, in.t};
  const bool kerr = std::holds_alternative<KerrPhase>(config.phase);
  const double kerr_scale = kerr ? 2.0 * std::numbers::pi * std::get<KerrPhase>(config.phase).alpha : 0.0;
  const auto& c = config.coin.entries();
  const bool hadamard = config.coin.is_hadamard();

  for (std::size_t i = in.index(in.support_lo); i <= in.index(in.support_hi); ++i) {
    Amplitude a = in.u[i];
    Amplitude b = in.d[i];
    if (kerr) {
      a *= unit_phase(kerr_scale * intensity(a));
      b *= unit_phase(kerr_scale * intensity(b));
    } else {
      auto [fu, fd] = eval(in.m_min + static_cast<std::int64_t>(i), a, b);
      a *= fu;
      b *= fd;
    }
    if (hadamard) {
      out.u[i + 1] = kInvSqrt2 * (a + b);
      out.d[i - 1] = kInvSqrt2 * (a - b);
    } else {
      out.u[i + 1] = c[0] * a + c[1] * b;
      out.d[i - 1] = c[2] * a + c[3] * b;
    }
  }
}

SpinorField step(const SpinorField& field, const SimConfig& config) {
  SpinorField out;
  step_into(field, out, config);
  return out;
}

bool is_recorded(std::int64_t t, const SimConfig& config) noexcept {
  return t == 0 || t == config.steps || (config.record_every > 0 && t % config.record_every == 0);
}

void evolve_each(const SimConfig& config, const std::function<void(const SpinorField&)>& visit) {
  config.validate();
  SpinorField current = make_initial(config.init, config.steps);
  SpinorField next;
  visit(current);
  for (std::int64_t t = 0; t < config.steps; ++t) {
    step_into(current, next, config);
    std::swap(current, next);
    visit(current);
  }
}

SpinorField crop_to_support(const SpinorField& field) {
  const std::int64_t lo = std::max(field.m_min, field.support_lo - 1);
  const std::int64_t hi = std::min(field.m_max(), field.support_hi + 1);
  SpinorField out;
  out.t = field.t;
  out.m_min = lo;
  out.support_lo = field.support_lo;
  out.support_hi = field.support_hi;
  out.u.assign(field.u.begin() + field.index(lo), field.u.begin() + field.index(hi) + 1);
  out.d.assign(field.d.begin() + field.index(lo), field.d.begin() + field.index(hi) + 1);
  return out;
}

std::vector<SpinorField> evolve(const SimConfig& config) {
  std::vector<SpinorField> snapshots;
  evolve_each(config, [&](const SpinorField& f) {
    if (is_recorded(f.t, config)) snapshots.push_back(f);
  });
  return snapshots;
}

}  // namespace nlgb
