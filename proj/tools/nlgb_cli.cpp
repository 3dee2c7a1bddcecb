// nlgb: command-line front end over the C interface.
//
//   nlgb run      --alpha 0.4 --steps 300 --out runs/a04
//   nlgb sweep    --alpha-from 0.49 --alpha-to 0.64 --alpha-step 0.01 --steps 2000 --jobs 4
//   nlgb fit      runs/sweep/sweep_index.csv
//   nlgb classify --alpha 0.49 --steps 1000      (or --run-dir runs/a049)
//
// Exit codes: 0 success, 1 numeric or runtime failure, 2 usage error,
// 3 indeterminate classification.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nlgb/nlgb.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Failure : std::runtime_error {
  Failure(nlgb_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  nlgb_status status;
};

// Configuration-time failures are the caller's input, anything later is a
// runtime failure.
void check_input(nlgb_status s) {
  if (s != NLGB_OK) throw UsageError(nlgb_last_error());
}

void check(nlgb_status s) {
  if (s != NLGB_OK) throw Failure(s, std::string(nlgb_status_name(s)) + ": " + nlgb_last_error());
}

struct ConfigHandle {
  nlgb_config* p = nullptr;
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  ~ConfigHandle() { nlgb_config_destroy(p); }
};

struct RunHandle {
  nlgb_run* p = nullptr;
  RunHandle() = default;
  RunHandle(const RunHandle&) = delete;
  RunHandle& operator=(const RunHandle&) = delete;
  ~RunHandle() { nlgb_run_destroy(p); }
};

struct SweepHandle {
  nlgb_sweep* p = nullptr;
  SweepHandle() = default;
  SweepHandle(const SweepHandle&) = delete;
  SweepHandle& operator=(const SweepHandle&) = delete;
  ~SweepHandle() { nlgb_sweep_destroy(p); }
};

template <class Get>
std::string fetch_text(Get get) {
  std::size_t needed = 0;
  check(get(nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(get(text.data(), text.size(), &needed));
  text.resize(needed - 1);
  return text;
}

std::string default_out_dir(const std::string& leaf) {
  const char* env = std::getenv("NLGB_OUT_DIR");
  const std::filesystem::path base = (env && *env) ? env : "nlgb_out";
  return (base / leaf).string();
}

const char* phase_text(nlgb_dynamical_phase p) {
  switch (p) {
    case NLGB_DYN_I: return "I";
    case NLGB_DYN_II: return "II";
    case NLGB_DYN_III: return "III";
    default: return "indeterminate";
  }
}

const char* behavior_text(nlgb_behavior b) {
  switch (b) {
    case NLGB_BEHAVIOR_OSCILLATING: return "oscillating";
    case NLGB_BEHAVIOR_LOCALIZED: return "localized";
    case NLGB_BEHAVIOR_ESCAPING: return "escaping";
    default: return "";
  }
}

std::string label_text(const nlgb_phase_label& label) {
  std::string s = phase_text(label.phase);
  if (label.behavior != NLGB_BEHAVIOR_NONE) s += std::string(" (") + behavior_text(label.behavior) + ")";
  return s;
}

// Flags shared by run, sweep and classify.
struct SimFlags {
  double alpha = 0.0;
  std::int64_t steps = 300;
  std::string init = "symmetric";
  std::string phase = "kerr";
  double phi0 = 0.0;
  int dm = 8;
  std::int64_t record_every = 1;
  std::string out;

  CLI::Option* alpha_opt = nullptr;
  CLI::Option* phi0_opt = nullptr;

  void add_to(CLI::App& app, bool with_alpha) {
    if (with_alpha) alpha_opt = app.add_option("--alpha", alpha, "Kerr nonlinearity strength")->capture_default_str();
    app.add_option("--steps", steps, "number of time steps")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--init", init, "symmetric, updelta, or a file of 'm u_re u_im d_re d_im' lines")
        ->capture_default_str();
    app.add_option("--phase", phase, "phase rule")
        ->capture_default_str()
        ->check(CLI::IsMember({"kerr", "none", "linear", "quadratic"}));
    phi0_opt = app.add_option("--phi0", phi0, "phase slope for linear/quadratic rules");
    app.add_option("--dm", dm, "soliton window halfwidth")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--record-every", record_every, "snapshot interval")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  void build(ConfigHandle& config) const {
    check_input(nlgb_config_create(&config.p));
    if (phase == "kerr") {
      if (phi0_opt && phi0_opt->count()) throw UsageError("--phi0 applies only to --phase linear|quadratic");
      check_input(nlgb_config_set_phase(config.p, NLGB_RULE_KERR, alpha));
    } else {
      if (alpha_opt && alpha_opt->count()) throw UsageError("--alpha applies only to --phase kerr");
      const nlgb_phase_rule rule =
          phase == "none" ? NLGB_RULE_NONE : phase == "linear" ? NLGB_RULE_LINEAR : NLGB_RULE_QUADRATIC;
      if (rule == NLGB_RULE_NONE && phi0_opt && phi0_opt->count())
        throw UsageError("--phi0 applies only to --phase linear|quadratic");
      check_input(nlgb_config_set_phase(config.p, rule, phi0));
    }
    if (init == "symmetric")
      check_input(nlgb_config_set_init(config.p, NLGB_INIT_SYMMETRIC));
    else if (init == "updelta")
      check_input(nlgb_config_set_init(config.p, NLGB_INIT_UPDELTA));
    else
      check_input(nlgb_config_load_init_file(config.p, init.c_str()));
    check_input(nlgb_config_set_steps(config.p, steps));
    check_input(nlgb_config_set_record_every(config.p, record_every));
    check_input(nlgb_config_set_halfwidth(config.p, dm));
  }
};

// Phase I/II and II/III boundaries lie near 0.47 and 0.67.
void warn_if_short(const nlgb_config* config) {
  std::int64_t steps = 0;
  int is_kerr = 0;
  double alpha = 0.0;
  if (nlgb_config_get_steps(config, &steps) != NLGB_OK || nlgb_config_get_alpha(config, &is_kerr, &alpha) != NLGB_OK)
    return;
  if (is_kerr && steps < 1000 && alpha >= 0.44 && alpha <= 0.70)
    std::fprintf(stderr, "warning: %lld steps may be too few to classify alpha = %g near a phase boundary\n",
                 static_cast<long long>(steps), alpha);
}

void warn_sweep_if_short(const SimFlags& flags, double from, double to) {
  if (flags.phase == "kerr" && flags.steps < 1000 && to >= 0.44 && from <= 0.70)
    std::fprintf(stderr, "warning: %lld steps may be too few to classify alphas near a phase boundary\n",
                 static_cast<long long>(flags.steps));
}

void print_run(const nlgb_run* run) {
  nlgb_phase_label label{};
  check(nlgb_run_phase(run, &label));
  std::printf("phase: %s\n", label_text(label).c_str());
  int found = 0;
  nlgb_collision col{};
  check(nlgb_run_collision(run, &found, &col));
  if (found)
    std::printf("collision: t_col=%lld before=%.4f after=%.4f\n", static_cast<long long>(col.t_col),
                col.intensity_before, col.intensity_after);
  double defect = 0.0;
  check(nlgb_run_max_norm_defect(run, &defect));
  std::printf("max |sum P - 1|: %.3e\n", defect);
}

int cmd_run(const SimFlags& flags) {
  ConfigHandle config;
  flags.build(config);
  RunHandle run;
  check(nlgb_run_create(config.p, &run.p));
  const std::string out = flags.out.empty() ? default_out_dir("run") : flags.out;
  check(nlgb_run_write_artifacts(run.p, out.c_str()));
  print_run(run.p);
  std::printf("artifacts: %s\n", out.c_str());
  return kExitOk;
}

int cmd_sweep(const SimFlags& flags, double from, double to, double step, int jobs) {
  if (flags.phase != "kerr") throw UsageError("sweep varies alpha and needs --phase kerr");
  if (!(step > 0.0)) throw UsageError("--alpha-step must be > 0");
  if (to < from) throw UsageError("empty alpha range: --alpha-to is below --alpha-from");
  ConfigHandle config;
  flags.build(config);
  warn_sweep_if_short(flags, from, to);
  SweepHandle sweep;
  const nlgb_status s = nlgb_sweep_create(config.p, from, to, step, jobs, &sweep.p);
  if (s == NLGB_ERR_INVALID_ARGUMENT) throw UsageError(nlgb_last_error());
  check(s);
  const std::string out = flags.out.empty() ? default_out_dir("sweep") : flags.out;
  check(nlgb_sweep_write_artifacts(sweep.p, out.c_str()));

  std::size_t n = 0;
  check(nlgb_sweep_size(sweep.p, &n));
  std::printf("%-10s %-8s %s\n", "alpha", "t_col", "phase");
  for (std::size_t i = 0; i < n; ++i) {
    double alpha = 0.0;
    int has = 0;
    std::int64_t t_col = 0;
    nlgb_phase_label label{};
    check(nlgb_sweep_entry(sweep.p, i, &alpha, &has, &t_col, &label));
    std::printf("%-10g %-8s %s\n", alpha, has ? std::to_string(t_col).c_str() : "-", label_text(label).c_str());
  }
  std::printf("artifacts: %s\n", out.c_str());
  return kExitOk;
}

int cmd_fit(const std::string& input, const std::string& report_path) {
  std::filesystem::path index = input;
  if (std::filesystem::is_directory(index)) index /= "sweep_index.csv";
  nlgb_fit_result fit{};
  check(nlgb_fit_sweep_index(index.string().c_str(), &fit));
  const std::string report =
      fetch_text([&](char* b, std::size_t c, std::size_t* n) { return nlgb_fit_report(&fit, b, c, n); });
  std::fputs(report.c_str(), stdout);
  const std::filesystem::path target =
      report_path.empty() ? index.parent_path() / "fit_report.txt" : std::filesystem::path(report_path);
  std::FILE* f = std::fopen(target.string().c_str(), "wb");
  if (!f) throw Failure(NLGB_ERR_IO, "cannot write " + target.string());
  std::fputs(report.c_str(), f);
  std::fclose(f);
  std::printf("report: %s\n", target.string().c_str());
  return kExitOk;
}

int cmd_classify(const SimFlags& flags, const std::string& run_dir) {
  ConfigHandle config;
  if (!run_dir.empty()) {
    const std::string manifest = (std::filesystem::path(run_dir) / "manifest.json").string();
    const nlgb_status s = nlgb_config_from_manifest(manifest.c_str(), &config.p);
    if (s != NLGB_OK) throw Failure(s, std::string("cannot load ") + manifest + ": " + nlgb_last_error());
  } else {
    flags.build(config);
  }
  warn_if_short(config.p);
  RunHandle run;
  check(nlgb_run_create(config.p, &run.p));
  const std::string report =
      fetch_text([&](char* b, std::size_t c, std::size_t* n) { return nlgb_run_report(run.p, b, c, n); });
  std::fputs(report.c_str(), stdout);
  nlgb_phase_label label{};
  check(nlgb_run_phase(run.p, &label));
  return label.phase == NLGB_DYN_INDETERMINATE ? kExitIndeterminate : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear quantum Galton board simulator"};
  app.require_subcommand(1);

  SimFlags run_flags;
  auto* run = app.add_subcommand("run", "evolve one configuration and write its artifacts");
  run_flags.add_to(*run, true);
  run->add_option("--out", run_flags.out, "output directory (default $NLGB_OUT_DIR/run)");

  SimFlags sweep_flags;
  double from = 0.0, to = 0.0, step = 0.01;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("sweep", "run one Kerr configuration per alpha");
  sweep_flags.add_to(*sweep, false);
  sweep->add_option("--alpha-from", from, "first alpha")->required();
  sweep->add_option("--alpha-to", to, "last alpha (inclusive)")->required();
  sweep->add_option("--alpha-step", step, "alpha increment")->capture_default_str();
  sweep->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_flags.out, "output directory (default $NLGB_OUT_DIR/sweep)");

  std::string fit_input, fit_report;
  auto* fit = app.add_subcommand("fit", "fit 1/t_col = a/alpha + b to a sweep index");
  fit->add_option("index", fit_input, "sweep_index.csv or the sweep directory")->required();
  fit->add_option("--out", fit_report, "report file (default fit_report.txt beside the index)");

  SimFlags cls_flags;
  std::string run_dir;
  auto* classify = app.add_subcommand("classify", "report the dynamical phase with its evidence");
  cls_flags.add_to(*classify, true);
  classify->add_option("--run-dir", run_dir, "re-evaluate the configuration recorded in a run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, from, to, step, jobs);
    if (*fit) return cmd_fit(fit_input, fit_report);
    if (*classify) return cmd_classify(cls_flags, run_dir);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n\n", e.what());
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
