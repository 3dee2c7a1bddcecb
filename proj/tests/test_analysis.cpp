#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlgb/analysis.hpp"
#include "nlgb/error.hpp"
#include "support.hpp"

using namespace nlgb;
using nlgb::testing::synthetic_track;

namespace {

SolitonTrack mirror(const SolitonTrack& right) {
  SolitonTrack left = right;
  left.side = Side::Left;
  for (auto& s : left.series) {
    s.m_cm = -s.m_cm;
    s.m_peak = -s.m_peak;
  }
  return left;
}

// Out to m=200 at t=100, back to the origin at t=200, then apart again.
double v_path(std::int64_t t) {
  if (t <= 100) return 2.0 * static_cast<double>(t);
  if (t <= 200) return 2.0 * static_cast<double>(200 - t);
  return 2.0 * static_cast<double>(t - 200);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected nlgb::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("turning point of a tent track") {
  const auto track = synthetic_track(Side::Right, 200, [](std::int64_t t) { return 20.0 - std::abs(t - 100.0); });
  const auto tp = detect_turning_point(track);
  REQUIRE(tp.has_value());
  CHECK(tp->t == 100);
  CHECK(tp->m == doctest::Approx(20.0));
}

TEST_CASE("no turning point for ballistic motion or small wiggles") {
  const auto line = synthetic_track(Side::Right, 300, [](std::int64_t t) { return 0.7 * static_cast<double>(t); });
  CHECK_FALSE(detect_turning_point(line).has_value());
  const auto wiggle = synthetic_track(Side::Right, 300, [](std::int64_t t) {
    return 0.5 * static_cast<double>(t) + 0.8 * std::sin(static_cast<double>(t) / 3.0);
  });
  CHECK_FALSE(detect_turning_point(wiggle).has_value());
  const auto tiny = synthetic_track(Side::Right, 12, [](std::int64_t t) { return static_cast<double>(t); });
  CHECK(code_of([&] { detect_turning_point(tiny); }) == ErrorCode::InsufficientData);
}

TEST_CASE("mirrored tracks meeting at t=200 collide at t=200") {
  auto right = synthetic_track(Side::Right, 800, v_path);
  for (auto& s : right.series) s.intensity = s.t < 200 ? 0.31 : 0.24;
  const auto left = mirror(right);

  const auto contacts = find_contacts(left, right, 0);
  REQUIRE(contacts.size() == 2);  // the start at the origin and the collision
  CHECK(contacts[1].first == 200);
  CHECK(contacts[1].last == 200);
  REQUIRE(contacts[1].released.has_value());
  CHECK(*contacts[1].released == 205);

  CHECK(collision_time(left, right) == std::optional<std::int64_t>(200));
  const auto event = detect_collision(left, right);
  REQUIRE(event.has_value());
  CHECK(event->t_col == 200);
  CHECK(event->intensity_before == doctest::Approx(0.31));
  CHECK(event->intensity_after == doctest::Approx(0.24));
}

TEST_CASE("collision needs the post-collision window") {
  const auto right = synthetic_track(Side::Right, 400, v_path);
  const auto left = mirror(right);
  CHECK(collision_time(left, right) == std::optional<std::int64_t>(200));
  CHECK(code_of([&] { (void)detect_collision(left, right); }) == ErrorCode::InsufficientData);
}

TEST_CASE("no collision without a turning point") {
  const auto right = synthetic_track(Side::Right, 600, [](std::int64_t t) { return 0.6 * static_cast<double>(t); });
  const auto left = mirror(right);
  CHECK_FALSE(detect_collision(left, right).has_value());
  CHECK_FALSE(collision_time(left, right).has_value());
}

TEST_CASE("hyperbola fit recovers exact parameters") {
  const double a = -0.0297, b = 0.0627;
  std::vector<CollisionPoint> pts;
  for (int k = 0; k <= 15; ++k) {
    const double alpha = 0.49 + 0.01 * k;
    pts.push_back({alpha, 1.0 / (a / alpha + b)});
  }
  const FitResult fit = fit_hyperbola(pts);
  CHECK(std::abs(fit.a - a) < 1e-10);
  CHECK(std::abs(fit.b - b) < 1e-10);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.alpha_I == doctest::Approx(0.0297 / 0.0627).epsilon(1e-9));
  CHECK(fit.points == pts.size());
}

TEST_CASE("hyperbola fit on noisy data") {
  std::vector<CollisionPoint> pts;
  for (int k = 0; k <= 15; ++k) {
    const double alpha = 0.49 + 0.01 * k;
    const double noise = 1.0 + 0.05 * std::sin(7.0 * k);
    pts.push_back({alpha, noise / (-0.0297 / alpha + 0.0627)});
  }
  const FitResult fit = fit_hyperbola(pts);
  CHECK(fit.r2 > 0.5);
  CHECK(fit.r2 < 1.0);
  CHECK(fit.alpha_I == doctest::Approx(0.474).epsilon(0.05));
}

TEST_CASE("hyperbola fit errors") {
  std::vector<CollisionPoint> two{{0.5, 100.0}, {0.6, 80.0}};
  CHECK(code_of([&] { fit_hyperbola(two); }) == ErrorCode::InsufficientData);
  std::vector<CollisionPoint> same{{0.5, 100.0}, {0.5, 90.0}, {0.5, 80.0}};
  CHECK(code_of([&] { fit_hyperbola(same); }) == ErrorCode::SingularFit);
  std::vector<CollisionPoint> bad{{0.5, 100.0}, {-0.6, 90.0}, {0.7, 80.0}};
  CHECK(code_of([&] { fit_hyperbola(bad); }) == ErrorCode::InvalidArgument);
  std::vector<CollisionPoint> flat{{0.5, 100.0}, {0.6, 100.0}, {0.7, 100.0}};
  const FitResult f = fit_hyperbola(flat);
  CHECK(std::isinf(f.alpha_I) == false);
  CHECK(f.a == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("phase codes round trip") {
  for (Phase p : {Phase::Ballistic, Phase::Recollapse, Phase::Chaotic, Phase::Indeterminate})
    CHECK(parse_phase_code(phase_code(p)) == p);
  for (ChaoticBehavior b :
       {ChaoticBehavior::None, ChaoticBehavior::Oscillating, ChaoticBehavior::Localized, ChaoticBehavior::Escaping})
    CHECK(parse_behavior_code(behavior_code(b)) == b);
  CHECK(phase_code(Phase::Recollapse) == "II");
  CHECK(code_of([] { parse_phase_code("IV"); }) == ErrorCode::Parse);
}

TEST_CASE("classification of synthetic tracks") {
  SUBCASE("ballistic") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) { return 0.6 * static_cast<double>(t); });
    CHECK(classify_phase(mirror(right), right, 1000).label.phase == Phase::Ballistic);
  }
  SUBCASE("single recollapse") {
    const auto right = synthetic_track(Side::Right, 1000, v_path);
    const auto c = classify_phase(mirror(right), right, 1000);
    CHECK(c.label.phase == Phase::Recollapse);
    REQUIRE(c.evidence.turning.has_value());
    CHECK(c.evidence.turning->t == 100);
    CHECK(c.evidence.contacts.size() == 1);
    CHECK(c.evidence.separates_monotonically);
  }
  SUBCASE("oscillating near the origin") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) {
      if (t <= 205) return v_path(t);
      return 7.0 + 2.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 80.0);
    });
    const auto c = classify_phase(mirror(right), right, 1000);
    CHECK(c.label.phase == Phase::Chaotic);
    CHECK(c.label.behavior == ChaoticBehavior::Oscillating);
    CHECK(c.evidence.tail_min == doctest::Approx(4.5).epsilon(0.01));
    CHECK(c.evidence.tail_max == doctest::Approx(9.5).epsilon(0.01));
    CHECK(c.evidence.tail_reversals > 2);
  }
  SUBCASE("localized far from the origin") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) {
      if (t <= 300) return v_path(t);        // collides at 200, out to 200 by t=300
      if (t <= 400) return 2.0 * (400.0 - t);  // second contact at 400
      if (t <= 425) return 2.0 * (t - 400.0);
      return 50.0 + 0.4 * std::sin(static_cast<double>(t));
    });
    const auto c = classify_phase(mirror(right), right, 1000);
    CHECK(c.label.phase == Phase::Chaotic);
    CHECK(c.label.behavior == ChaoticBehavior::Localized);
    CHECK(c.label.m_eq == doctest::Approx(50.0).epsilon(0.01));
  }
  SUBCASE("escaping after repeated contacts") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) {
      if (t <= 300) return v_path(t);
      if (t <= 400) return 2.0 * (400.0 - t);
      return 0.3 * (t - 400.0);
    });
    const auto c = classify_phase(mirror(right), right, 1000);
    CHECK(c.label.phase == Phase::Chaotic);
    CHECK(c.label.behavior == ChaoticBehavior::Escaping);
    CHECK(c.evidence.contacts.size() == 2);
  }
  SUBCASE("stalled without a turning point") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) {
      return t < 300 ? 0.2 * static_cast<double>(t) : 60.0 + 0.001 * static_cast<double>(t - 300);
    });
    const auto c = classify_phase(mirror(right), right, 1000);
    CHECK(c.label.phase == Phase::Indeterminate);
    CHECK(c.evidence.tail_speed == doctest::Approx(0.001));
  }
  SUBCASE("turn too close to the end") {
    const auto right = synthetic_track(Side::Right, 1000, [](std::int64_t t) { return 950.0 - std::abs(t - 950.0); });
    CHECK(classify_phase(mirror(right), right, 1000).label.phase == Phase::Indeterminate);
  }
}
