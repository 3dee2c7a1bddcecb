#pragma once

// Soliton dynamics on top of the tracks: turning points, contact episodes
// between the two solitons, the collision-time hyperbola, and the dynamical
// phase of a run.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlgb/observables.hpp"

namespace nlgb {

struct TurningPoint {
  std::int64_t t = 0;
  double m = 0.0;  // unsmoothed m_CM at t
  friend bool operator==(const TurningPoint&, const TurningPoint&) = default;
};

struct TurningOptions {
  std::int64_t from_t = 10;   // samples before this are formation transient
  int smoothing = 11;         // centered moving-average length, in samples
  double min_drop = 2.0;      // sites the smoothed m_CM must fall below its maximum
  std::size_t min_samples = 20;
};

// First strict local maximum of the smoothed m_CM that is followed by a drop of
// at least `min_drop` sites before the maximum is exceeded again. Throws
// InsufficientData when fewer than `min_samples` valid samples follow `from_t`.
std::optional<TurningPoint> detect_turning_point(const SolitonTrack& track, const TurningOptions& options = {});

// A stretch of the run in which the solitons touch: it opens when the
// separation right.m_CM - left.m_CM first falls to `contact_separation` and
// closes when it exceeds `release_separation`.
struct ContactEpisode {
  std::int64_t first = 0;
  std::int64_t last = 0;                  // last step still in contact
  std::optional<std::int64_t> released;  // step at which the solitons are apart again
  friend bool operator==(const ContactEpisode&, const ContactEpisode&) = default;
};

struct ContactOptions {
  double contact_separation = 2.0;
  double release_separation = 2.0 * kDefaultHalfwidth;
};

std::vector<ContactEpisode> find_contacts(const SolitonTrack& left, const SolitonTrack& right, std::int64_t from_t,
                                          const ContactOptions& options = {});

struct CollisionEvent {
  std::int64_t t_col = 0;
  double intensity_before = 0.0;
  double intensity_after = 0.0;
  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

struct CollisionOptions {
  TurningOptions turning;
  ContactOptions contact;
  // Pre-collision intensity: lowest `before_smoothing`-sample moving average of
  // the right soliton between `before_from` and the first contact, using only
  // samples where the solitons are at least `release_separation` apart.
  std::int64_t before_from = 50;
  int before_smoothing = 41;
  // Post-collision intensity: mean over [t_col + after_begin, t_col + after_end].
  std::int64_t after_begin = 400;
  std::int64_t after_end = 500;
};

// t_col is the last contact step of the first contact episode after the right
// soliton's turning point, i.e. the step after which the solitons re-emerge.
// Returns nullopt without a turning point or contact. Throws InsufficientData
// when the run ends before the post-collision window.
std::optional<CollisionEvent> detect_collision(const SolitonTrack& left, const SolitonTrack& right,
                                               const CollisionOptions& options = {});

// Collision time alone; unlike detect_collision it needs no post-collision window.
std::optional<std::int64_t> collision_time(const SolitonTrack& left, const SolitonTrack& right,
                                           const CollisionOptions& options = {});

struct CollisionPoint {
  double alpha = 0.0;
  double t_col = 0.0;
};

// Least squares of 1/t_col = a / alpha + b.
struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  double alpha_I = 0.0;  // -a/b; infinite when b == 0
  std::size_t points = 0;
};

// Throws InsufficientData for fewer than 3 points, InvalidArgument for
// non-positive values, SingularFit when all alphas coincide.
FitResult fit_hyperbola(std::span<const CollisionPoint> points);

enum class Phase { Ballistic, Recollapse, Chaotic, Indeterminate };
enum class ChaoticBehavior { None, Oscillating, Localized, Escaping };

struct PhaseLabel {
  Phase phase = Phase::Indeterminate;
  ChaoticBehavior behavior = ChaoticBehavior::None;
  double m_eq = 0.0;  // Localized only
  friend bool operator==(const PhaseLabel&, const PhaseLabel&) = default;
};

std::string phase_code(Phase phase);           // "I", "II", "III", "indeterminate"
std::string behavior_code(ChaoticBehavior b);  // "oscillating", "localized", "escaping", ""
Phase parse_phase_code(const std::string& code);
ChaoticBehavior parse_behavior_code(const std::string& code);

struct PhaseEvidence {
  std::optional<TurningPoint> turning;
  std::vector<ContactEpisode> contacts;
  bool separates_monotonically = false;  // after the last released contact
  double tail_min = 0.0;                 // right m_CM over the last quarter
  double tail_max = 0.0;
  double tail_mean = 0.0;
  double tail_speed = 0.0;  // net drift of the right m_CM over the tail, sites per step
  std::size_t tail_reversals = 0;
};

struct Classification {
  PhaseLabel label;
  PhaseEvidence evidence;
};

struct ClassifyOptions {
  CollisionOptions collision;
  double tail_fraction = 0.25;
  double band_sites = 3.0;
  double late_turn_fraction = 0.10;  // turning point this close to the end is indeterminate
  double stall_speed = 0.02;         // below this a track without a turning point is not ballistic
};

// Phase I: no turning point and still moving outward. II: one contact episode then monotone separation
// to the end. III otherwise: Localized when the last-quarter m_CM range is
// below `band_sites`, Escaping when the solitons separate monotonically after
// several contacts, Oscillating for any other bounded motion.
Classification classify_phase(const SolitonTrack& left, const SolitonTrack& right, std::int64_t steps,
                              const ClassifyOptions& options = {});

}  // namespace nlgb
