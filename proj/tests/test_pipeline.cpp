#include <cmath>

#include "doctest.h"
#include "nlgb/error.hpp"
#include "nlgb/pipeline.hpp"
#include "support.hpp"

using namespace nlgb;
using nlgb::testing::TempDir;

namespace {

SimConfig kerr(double alpha, std::int64_t steps) {
  SimConfig c;
  c.phase = KerrPhase{alpha};
  c.steps = steps;
  return c;
}

}  // namespace

TEST_CASE("alpha grid") {
  const auto g = alpha_grid(0.49, 0.64, 0.01);
  REQUIRE(g.size() == 16);
  CHECK(g.front() == 0.49);
  CHECK(g[7] == 0.56);
  CHECK(g.back() == 0.64);
  CHECK(alpha_grid(0.5, 0.5, 0.1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(alpha_grid(0.6, 0.5, 0.01), Error);
  CHECK_THROWS_AS(alpha_grid(0.5, 0.6, 0.0), Error);
  CHECK(sweep_summary_name(0.49) == "run_alpha_0.49.json");
}

TEST_CASE("run record covers every step") {
  SimConfig c = kerr(0.3, 120);
  c.record_every = 50;
  const RunRecord rec = execute_run(c);
  CHECK(rec.snapshots.size() == 4);  // 0, 50, 100, 120
  CHECK(rec.right.series.size() == 121);
  CHECK(rec.sigma_over_t.size() == 120);
  CHECK(rec.sigma_over_t.front().t == 1);
  CHECK(rec.sigma_over_t.front().sigma_over_t == doctest::Approx(1.0));
  CHECK(rec.norm_defect.size() == 121);
  for (double d : rec.norm_defect) CHECK(d < 1e-12);
  // Cropping keeps the full light cone.
  CHECK(rec.snapshots.back().support_lo == -120);
  CHECK(rec.snapshots.back().support_hi == 120);
}

TEST_CASE("phase of representative runs") {
  CHECK(analyze(execute_run(kerr(0.4, 1000))).classification.label.phase == Phase::Ballistic);
  const RunAnalysis ii = analyze(execute_run(kerr(0.49, 1100)));
  CHECK(ii.classification.label.phase == Phase::Recollapse);
  REQUIRE(ii.t_col.has_value());
  REQUIRE(ii.classification.evidence.turning.has_value());
  CHECK(ii.classification.evidence.turning->m > 0.0);
}

TEST_CASE("short phase II run reports why the collision is incomplete") {
  const RunAnalysis a = analyze(execute_run(kerr(0.49, 600)));
  CHECK_FALSE(a.collision.has_value());
  CHECK(a.t_col.has_value());
  CHECK(a.collision_note.find("post-collision") != std::string::npos);
}

TEST_CASE("sweep is independent of the worker count") {
  const SimConfig base = kerr(0.0, 400);
  const auto alphas = alpha_grid(0.55, 0.6, 0.01);
  const SweepResult one = run_sweep(base, alphas, {}, 1);
  const SweepResult many = run_sweep(base, alphas, {}, 4);
  CHECK(one.entries == many.entries);
  CHECK(one.summaries == many.summaries);

  TempDir dir;
  write_sweep_artifacts(dir / "one", base, {}, one, 0.0);
  write_sweep_artifacts(dir / "many", base, {}, many, 0.0);
  CHECK(read_text_file(dir / "one" / "sweep_index.csv") == read_text_file(dir / "many" / "sweep_index.csv"));
  for (const auto& e : one.entries)
    CHECK(read_text_file(dir / "one" / e.summary_file) == read_text_file(dir / "many" / e.summary_file));
}

TEST_CASE("single-point sweep equals a direct run") {
  const SimConfig base = kerr(0.0, 300);
  const SweepResult s = run_sweep(base, {0.4}, {}, 1);
  const RunRecord rec = execute_run(kerr(0.4, 300));
  CHECK(summary_json(s.summaries[0]) == summary_json(summarize(rec, analyze(rec))));
}

TEST_CASE("sweep needs alphas") { CHECK_THROWS_AS(run_sweep(kerr(0.0, 10), {}, {}, 1), Error); }

TEST_CASE("run artifacts and manifest") {
  TempDir dir;
  const SimConfig c = kerr(0.2, 50);
  const RunRecord rec = execute_run(c);
  const auto names = write_run_artifacts(dir.path(), rec, analyze(rec), 0.5);
  CHECK(names ==
        std::vector<std::string>{"distribution.csv", "density.txt", "tracks.csv", "summary.json", "manifest.json"});
  const RunManifest m = read_manifest(dir / "manifest.json");
  CHECK(m.config == c);
  CHECK(m.artifacts.size() == 4);
  CHECK(m.wall_time_s == 0.5);

  // Re-running from the manifest reproduces the artifacts.
  TempDir again;
  const RunRecord rec2 = execute_run(m.config, {m.halfwidth, true, {}});
  write_run_artifacts(again.path(), rec2, analyze(rec2), 0.0);
  for (const char* f : {"distribution.csv", "density.txt", "tracks.csv", "summary.json"})
    CHECK(read_text_file(dir / f) == read_text_file(again / f));
}

TEST_CASE("non-finite evolution is a numeric error") {
  SimConfig c = kerr(0.0, 5);
  c.phase = CustomPhase{"nan", [](std::int64_t, std::int64_t t, double, double) {
                          return std::pair{t == 2 ? std::nan("") : 0.0, 0.0};
                        }};
  try {
    execute_run(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Numeric);
  }
}
