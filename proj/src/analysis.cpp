#include "nlgb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "nlgb/error.hpp"

namespace nlgb {

namespace {

struct Sample {
  std::int64_t t;
  double value;
};

std::vector<Sample> positions(const SolitonTrack& track, std::int64_t from_t) {
  std::vector<Sample> out;
  for (const auto& s : track.series)
    if (s.valid && s.t >= from_t) out.push_back({s.t, s.m_cm});
  return out;
}

std::vector<double> moving_average(const std::vector<Sample>& xs, int window) {
  // Entry i averages xs[i .. i + window - 1].
  std::vector<double> out;
  if (window < 1 || xs.size() < static_cast<std::size_t>(window)) return out;
  double sum = 0.0;
  for (int k = 0; k < window; ++k) sum += xs[static_cast<std::size_t>(k)].value;
  out.push_back(sum / window);
  for (std::size_t i = static_cast<std::size_t>(window); i < xs.size(); ++i) {
    sum += xs[i].value - xs[i - static_cast<std::size_t>(window)].value;
    out.push_back(sum / window);
  }
  return out;
}

// Separation right - left at every step where both tracks are valid.
std::vector<Sample> separations(const SolitonTrack& left, const SolitonTrack& right, std::int64_t from_t) {
  std::map<std::int64_t, double> left_at;
  for (const auto& s : left.series)
    if (s.valid && s.t >= from_t) left_at.emplace(s.t, s.m_cm);
  std::vector<Sample> out;
  for (const auto& s : right.series) {
    if (!s.valid || s.t < from_t) continue;
    auto it = left_at.find(s.t);
    if (it != left_at.end()) out.push_back({s.t, s.m_cm - it->second});
  }
  return out;
}

std::string steps_message(const char* what, std::int64_t needed) {
  std::ostringstream msg;
  msg << what << "; rerun with at least " << needed << " steps";
  return msg.str();
}

}  // namespace

std::optional<TurningPoint> detect_turning_point(const SolitonTrack& track, const TurningOptions& options) {
  const std::vector<Sample> xs = positions(track, options.from_t);
  if (xs.size() < std::max<std::size_t>(options.min_samples, static_cast<std::size_t>(options.smoothing)))
    throw Error(ErrorCode::InsufficientData, "track too short for turning-point detection");

  // Centered average: smooth[j] belongs to sample j + half.
  const std::vector<double> smooth = moving_average(xs, options.smoothing);
  const std::size_t half = static_cast<std::size_t>(options.smoothing / 2);

  for (std::size_t j = 1; j + 1 < smooth.size(); ++j) {
    if (!(smooth[j] > smooth[j - 1] && smooth[j] >= smooth[j + 1])) continue;
    // Plateau tops count once, at their first sample, and only if they end in a descent.
    std::size_t k = j + 1;
    bool turned = false;
    for (; k < smooth.size(); ++k) {
      if (smooth[k] > smooth[j]) break;
      if (smooth[k] <= smooth[j] - options.min_drop) {
        turned = true;
        break;
      }
    }
    if (turned) return TurningPoint{xs[j + half].t, xs[j + half].value};
  }
  return std::nullopt;
}

std::vector<ContactEpisode> find_contacts(const SolitonTrack& left, const SolitonTrack& right, std::int64_t from_t,
                                          const ContactOptions& options) {
  std::vector<ContactEpisode> episodes;
  bool in_contact = false;
  for (const auto& s : separations(left, right, from_t)) {
    if (!in_contact) {
      if (s.value <= options.contact_separation) {
        episodes.push_back({s.t, s.t, std::nullopt});
        in_contact = true;
      }
    } else if (s.value <= options.contact_separation) {
      episodes.back().last = s.t;
    } else if (s.value > options.release_separation) {
      episodes.back().released = s.t;
      in_contact = false;
    }
  }
  return episodes;
}

namespace {

std::optional<ContactEpisode> first_collision(const SolitonTrack& left, const SolitonTrack& right,
                                              const CollisionOptions& options) {
  const auto turning = detect_turning_point(right, options.turning);
  if (!turning) return std::nullopt;
  const auto episodes = find_contacts(left, right, turning->t, options.contact);
  if (episodes.empty()) return std::nullopt;
  return episodes.front();
}

}  // namespace

std::optional<std::int64_t> collision_time(const SolitonTrack& left, const SolitonTrack& right,
                                           const CollisionOptions& options) {
  const auto episode = first_collision(left, right, options);
  if (!episode || !episode->released) return std::nullopt;
  return episode->last;
}

std::optional<CollisionEvent> detect_collision(const SolitonTrack& left, const SolitonTrack& right,
                                               const CollisionOptions& options) {
  const auto episode = first_collision(left, right, options);
  if (!episode) return std::nullopt;
  const std::int64_t last_t = right.series.empty() ? 0 : right.series.back().t;
  if (!episode->released)
    throw Error(ErrorCode::InsufficientData,
                steps_message("solitons are still in contact at the end of the run", last_t + options.after_end));

  CollisionEvent event;
  event.t_col = episode->last;

  // Before: separated samples only, so the window never holds both solitons.
  std::map<std::int64_t, double> apart;
  for (const auto& s : separations(left, right, options.before_from))
    if (s.t < episode->first && s.value >= options.contact.release_separation) apart.emplace(s.t, s.value);
  std::vector<Sample> before;
  for (const auto& s : right.series)
    if (s.valid && apart.count(s.t)) before.push_back({s.t, s.intensity});
  if (before.empty()) throw Error(ErrorCode::InsufficientData, "no separated samples before the collision");
  const std::vector<double> smooth = moving_average(before, options.before_smoothing);
  if (smooth.empty()) {
    double sum = 0.0;
    for (const auto& s : before) sum += s.value;
    event.intensity_before = sum / static_cast<double>(before.size());
  } else {
    event.intensity_before = *std::min_element(smooth.begin(), smooth.end());
  }

  const std::int64_t from = event.t_col + options.after_begin, to = event.t_col + options.after_end;
  if (last_t < to)
    throw Error(ErrorCode::InsufficientData, steps_message("run ends before the post-collision window", to));
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : right.series) {
    if (s.valid && s.t >= from && s.t <= to) {
      sum += s.intensity;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::InsufficientData, "no samples in the post-collision window");
  event.intensity_after = sum / static_cast<double>(count);
  return event;
}

FitResult fit_hyperbola(std::span<const CollisionPoint> points) {
  if (points.size() < 3) throw Error(ErrorCode::InsufficientData, "hyperbola fit needs at least 3 points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.alpha > 0.0) || !(p.t_col > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.t_col))
      throw Error(ErrorCode::InvalidArgument, "hyperbola fit needs alpha > 0 and t_col > 0");
    x.push_back(1.0 / p.alpha);
    y.push_back(1.0 / p.t_col);
  }
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || sxx <= 1e-24 * mx * mx * n)
    throw Error(ErrorCode::SingularFit, "all alpha values coincide; slope is undetermined");

  FitResult fit;
  fit.points = x.size();
  fit.a = sxy / sxx;
  fit.b = my - fit.a * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.a * x[i] + fit.b);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.alpha_I = fit.b != 0.0 ? -fit.a / fit.b : std::numeric_limits<double>::infinity();
  return fit;
}

std::string phase_code(Phase phase) {
  switch (phase) {
    case Phase::Ballistic: return "I";
    case Phase::Recollapse: return "II";
    case Phase::Chaotic: return "III";
    case Phase::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string behavior_code(ChaoticBehavior b) {
  switch (b) {
    case ChaoticBehavior::Oscillating: return "oscillating";
    case ChaoticBehavior::Localized: return "localized";
    case ChaoticBehavior::Escaping: return "escaping";
    case ChaoticBehavior::None: return "";
  }
  return "";
}

Phase parse_phase_code(const std::string& code) {
  for (Phase p : {Phase::Ballistic, Phase::Recollapse, Phase::Chaotic, Phase::Indeterminate})
    if (phase_code(p) == code) return p;
  throw Error(ErrorCode::Parse, "unknown phase code '" + code + "'");
}

ChaoticBehavior parse_behavior_code(const std::string& code) {
  for (auto b : {ChaoticBehavior::None, ChaoticBehavior::Oscillating, ChaoticBehavior::Localized,
                 ChaoticBehavior::Escaping})
    if (behavior_code(b) == code) return b;
  throw Error(ErrorCode::Parse, "unknown behavior code '" + code + "'");
}

Classification classify_phase(const SolitonTrack& left, const SolitonTrack& right, std::int64_t steps,
                              const ClassifyOptions& options) {
  Classification result;
  PhaseEvidence& ev = result.evidence;
  PhaseLabel& label = result.label;

  const auto tail_from = static_cast<std::int64_t>(std::floor(static_cast<double>(steps) * (1.0 - options.tail_fraction)));
  const std::vector<Sample> tail = positions(right, tail_from);
  if (!tail.empty()) {
    ev.tail_min = ev.tail_max = tail.front().value;
    double sum = 0.0;
    for (const auto& s : tail) {
      ev.tail_min = std::min(ev.tail_min, s.value);
      ev.tail_max = std::max(ev.tail_max, s.value);
      sum += s.value;
    }
    ev.tail_mean = sum / static_cast<double>(tail.size());
    if (tail.size() > 1)
      ev.tail_speed = (tail.back().value - tail.front().value) / static_cast<double>(tail.back().t - tail.front().t);
    // Direction changes of the smoothed tail, with one site of hysteresis.
    const std::vector<double> smooth = moving_average(tail, options.collision.turning.smoothing);
    if (!smooth.empty()) {
      double anchor = smooth.front();
      int direction = 0;
      for (double v : smooth) {
        const int now = v > anchor + 1.0 ? 1 : (v < anchor - 1.0 ? -1 : 0);
        if (now == 0) continue;
        if (direction != 0 && now != direction) ++ev.tail_reversals;
        direction = now;
        anchor = v;
      }
    }
  }
  const bool banded = !tail.empty() && (ev.tail_max - ev.tail_min) < options.band_sites;

  ev.turning = detect_turning_point(right, options.collision.turning);
  if (!ev.turning) {
    // A stalled soliton may still be about to turn.
    label.phase = ev.tail_speed >= options.stall_speed ? Phase::Ballistic : Phase::Indeterminate;
    return result;
  }
  if (static_cast<double>(ev.turning->t) >= static_cast<double>(steps) * (1.0 - options.late_turn_fraction)) {
    label.phase = Phase::Indeterminate;
    return result;
  }

  ev.contacts = find_contacts(left, right, ev.turning->t, options.collision.contact);
  bool remainder_short = false;
  if (!ev.contacts.empty() && ev.contacts.back().released) {
    TurningOptions after = options.collision.turning;
    after.from_t = *ev.contacts.back().released;
    try {
      ev.separates_monotonically = !detect_turning_point(right, after).has_value();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      remainder_short = true;
    }
  }

  if (ev.contacts.empty()) {
    // Turned around but has not met the other soliton yet.
    if (banded) {
      label = {Phase::Chaotic, ChaoticBehavior::Localized, ev.tail_mean};
    } else {
      label.phase = Phase::Indeterminate;
    }
    return result;
  }
  if (remainder_short) {
    label.phase = Phase::Indeterminate;
    return result;
  }
  if (ev.contacts.size() == 1 && ev.separates_monotonically) {
    label.phase = Phase::Recollapse;
    return result;
  }
  label.phase = Phase::Chaotic;
  if (banded) {
    label.behavior = ChaoticBehavior::Localized;
    label.m_eq = ev.tail_mean;
  } else if (ev.separates_monotonically && ev.contacts.size() >= 2) {
    label.behavior = ChaoticBehavior::Escaping;
  } else {
    label.behavior = ChaoticBehavior::Oscillating;
  }
  return result;
}

}  // namespace nlgb
