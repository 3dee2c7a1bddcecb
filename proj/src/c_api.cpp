#include "nlgb/nlgb.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "nlgb/error.hpp"
#include "nlgb/pipeline.hpp"

struct nlgb_config {
  nlgb::SimConfig sim;
  nlgb::RunOptions options;
};

struct nlgb_run {
  nlgb::RunRecord record;
  nlgb::RunAnalysis analysis;
  double wall_time_s = 0.0;
};

struct nlgb_sweep {
  nlgb::SimConfig base;
  nlgb::RunOptions options;
  nlgb::SweepResult result;
  double wall_time_s = 0.0;
};

namespace {

thread_local std::string g_last_error;

nlgb_status to_status(nlgb::ErrorCode code) { return static_cast<nlgb_status>(static_cast<int>(code)); }

template <class F>
nlgb_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return NLGB_OK;
  } catch (const nlgb::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NLGB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NLGB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NLGB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, what);
}

void copy_out(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr && cap == 0) return;
  require(buf != nullptr, "null buffer");
  if (cap < text.size() + 1) throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

nlgb_phase_label to_c(const nlgb::PhaseLabel& label) {
  nlgb_phase_label out{};
  switch (label.phase) {
    case nlgb::Phase::Ballistic: out.phase = NLGB_DYN_I; break;
    case nlgb::Phase::Recollapse: out.phase = NLGB_DYN_II; break;
    case nlgb::Phase::Chaotic: out.phase = NLGB_DYN_III; break;
    case nlgb::Phase::Indeterminate: out.phase = NLGB_DYN_INDETERMINATE; break;
  }
  switch (label.behavior) {
    case nlgb::ChaoticBehavior::None: out.behavior = NLGB_BEHAVIOR_NONE; break;
    case nlgb::ChaoticBehavior::Oscillating: out.behavior = NLGB_BEHAVIOR_OSCILLATING; break;
    case nlgb::ChaoticBehavior::Localized: out.behavior = NLGB_BEHAVIOR_LOCALIZED; break;
    case nlgb::ChaoticBehavior::Escaping: out.behavior = NLGB_BEHAVIOR_ESCAPING; break;
  }
  out.m_eq = label.m_eq;
  return out;
}

nlgb_fit_result to_c(const nlgb::FitResult& fit) { return {fit.a, fit.b, fit.r2, fit.alpha_I, fit.points}; }

const nlgb::SpinorField& snapshot(const nlgb_run* run, std::size_t index) {
  require(run != nullptr, "null run");
  if (index >= run->record.snapshots.size()) throw nlgb::Error(nlgb::ErrorCode::Bounds, "snapshot index out of range");
  return run->record.snapshots[index];
}

std::string describe(const nlgb::Classification& c, const nlgb::RunAnalysis& a) {
  std::ostringstream os;
  os << "phase: " << nlgb::phase_code(c.label.phase);
  if (c.label.behavior != nlgb::ChaoticBehavior::None) os << " (" << nlgb::behavior_code(c.label.behavior) << ")";
  if (c.label.behavior == nlgb::ChaoticBehavior::Localized) os << " m_eq=" << nlgb::format_double(c.label.m_eq);
  os << '\n';
  const auto& ev = c.evidence;
  if (ev.turning)
    os << "turning point: t=" << ev.turning->t << " m=" << ev.turning->m << '\n';
  else
    os << "turning point: none\n";
  os << "contact episodes: " << ev.contacts.size() << '\n';
  for (const auto& ep : ev.contacts) {
    os << "  t=" << ep.first << ".." << ep.last;
    if (ep.released) os << " released t=" << *ep.released;
    else os << " not released";
    os << '\n';
  }
  os << "tail m_cm: min=" << nlgb::format_double(ev.tail_min) << " max=" << nlgb::format_double(ev.tail_max)
     << " mean=" << nlgb::format_double(ev.tail_mean) << " speed=" << nlgb::format_double(ev.tail_speed) << " reversals=" << ev.tail_reversals << '\n';
  os << "monotone separation after last release: " << (ev.separates_monotonically ? "yes" : "no") << '\n';
  if (a.t_col) os << "t_col: " << *a.t_col << '\n';
  if (a.collision)
    os << "intensity before/after: " << nlgb::format_double(a.collision->intensity_before) << " / "
       << nlgb::format_double(a.collision->intensity_after) << '\n';
  else if (!a.collision_note.empty())
    os << "collision: " << a.collision_note << '\n';
  return os.str();
}

}  // namespace

extern "C" {

const char* nlgb_version(void) { return "1.0.0"; }

const char* nlgb_last_error(void) { return g_last_error.c_str(); }

const char* nlgb_status_name(nlgb_status status) {
  switch (status) {
    case NLGB_OK: return "ok";
    case NLGB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NLGB_ERR_NORMALIZATION: return "normalization";
    case NLGB_ERR_BOUNDS: return "bounds";
    case NLGB_ERR_NUMERIC: return "numeric";
    case NLGB_ERR_IO: return "io";
    case NLGB_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case NLGB_ERR_SINGULAR_FIT: return "singular fit";
    case NLGB_ERR_PARSE: return "parse";
    case NLGB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

nlgb_status nlgb_config_create(nlgb_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new nlgb_config{};
  });
}

nlgb_status nlgb_config_clone(const nlgb_config* config, nlgb_config** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = new nlgb_config{*config};
  });
}

void nlgb_config_destroy(nlgb_config* config) { delete config; }

nlgb_status nlgb_config_set_phase(nlgb_config* config, nlgb_phase_rule rule, double parameter) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(std::isfinite(parameter), "phase parameter must be finite");
    switch (rule) {
      case NLGB_RULE_NONE: config->sim.phase = nlgb::NoPhase{}; break;
      case NLGB_RULE_KERR: config->sim.phase = nlgb::KerrPhase{parameter}; break;
      case NLGB_RULE_LINEAR: config->sim.phase = nlgb::LinearPhase{parameter}; break;
      case NLGB_RULE_QUADRATIC: config->sim.phase = nlgb::QuadraticPhase{parameter}; break;
      default: throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, "unknown phase rule");
    }
  });
}

nlgb_status nlgb_config_set_custom_phase(nlgb_config* config, const char* name, nlgb_phase_fn fn, void* user) {
  return guarded([&] {
    require(config != nullptr && fn != nullptr, "null argument");
    nlgb::CustomPhase custom;
    custom.name = name ? name : "custom";
    custom.fn = [fn, user](std::int64_t m, std::int64_t t, double pu, double pd) {
      double fu = 0.0, fd = 0.0;
      fn(m, t, pu, pd, &fu, &fd, user);
      return std::pair{fu, fd};
    };
    config->sim.phase = std::move(custom);
  });
}

nlgb_status nlgb_config_set_coin(nlgb_config* config, const double re[4], const double im[4]) {
  return guarded([&] {
    require(config != nullptr && re != nullptr && im != nullptr, "null argument");
    std::array<nlgb::Amplitude, 4> c;
    for (int k = 0; k < 4; ++k) c[k] = {re[k], im[k]};
    config->sim.coin = nlgb::CoinOp::from_matrix(c[0], c[1], c[2], c[3]);
  });
}

nlgb_status nlgb_config_set_init(nlgb_config* config, nlgb_init_kind kind) {
  return guarded([&] {
    require(config != nullptr, "null config");
    switch (kind) {
      case NLGB_INIT_SYMMETRIC: config->sim.init = nlgb::SymmetricDelta{}; break;
      case NLGB_INIT_UPDELTA: config->sim.init = nlgb::UpDelta{}; break;
      default: throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, "unknown initial condition");
    }
  });
}

nlgb_status nlgb_config_set_custom_init(nlgb_config* config, size_t n, const int64_t* m, const double* u_re,
                                        const double* u_im, const double* d_re, const double* d_im) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(n > 0 && m && u_re && u_im && d_re && d_im, "custom init needs at least one site");
    nlgb::CustomInit init;
    for (std::size_t k = 0; k < n; ++k) init.sites.push_back({m[k], {u_re[k], u_im[k]}, {d_re[k], d_im[k]}});
    (void)nlgb::make_initial(init, 0);  // validates normalization now rather than at run time
    config->sim.init = std::move(init);
  });
}

nlgb_status nlgb_config_load_init_file(nlgb_config* config, const char* path) {
  return guarded([&] {
    require(config != nullptr && path != nullptr, "null argument");
    nlgb::CustomInit init = nlgb::read_init_file(path);
    (void)nlgb::make_initial(init, 0);
    config->sim.init = std::move(init);
  });
}

nlgb_status nlgb_config_set_steps(nlgb_config* config, int64_t steps) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(steps >= 0, "steps must be >= 0");
    config->sim.steps = steps;
  });
}

nlgb_status nlgb_config_set_record_every(nlgb_config* config, int64_t record_every) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(record_every >= 1, "record_every must be >= 1");
    config->sim.record_every = record_every;
  });
}

nlgb_status nlgb_config_set_halfwidth(nlgb_config* config, int halfwidth) {
  return guarded([&] {
    require(config != nullptr, "null config");
    require(halfwidth >= 0, "halfwidth must be >= 0");
    config->options.halfwidth = halfwidth;
  });
}

nlgb_status nlgb_config_get_steps(const nlgb_config* config, int64_t* steps) {
  return guarded([&] {
    require(config != nullptr && steps != nullptr, "null argument");
    *steps = config->sim.steps;
  });
}

nlgb_status nlgb_config_get_alpha(const nlgb_config* config, int* is_kerr, double* alpha) {
  return guarded([&] {
    require(config != nullptr && is_kerr != nullptr && alpha != nullptr, "null argument");
    const auto a = nlgb::kerr_alpha(config->sim);
    *is_kerr = a.has_value();
    *alpha = a.value_or(0.0);
  });
}

nlgb_status nlgb_config_to_json(const nlgb_config* config, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(config != nullptr, "null config");
    copy_out(nlgb::config_json(config->sim), buf, cap, needed);
  });
}

nlgb_status nlgb_config_from_json(const char* json, nlgb_config** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<nlgb_config>();
    c->sim = nlgb::parse_config_json(json);
    *out = c.release();
  });
}

nlgb_status nlgb_config_from_manifest(const char* path, nlgb_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const nlgb::RunManifest manifest = nlgb::read_manifest(path);
    auto c = std::make_unique<nlgb_config>();
    c->sim = manifest.config;
    c->options.halfwidth = manifest.halfwidth;
    *out = c.release();
  });
}

nlgb_status nlgb_run_create(const nlgb_config* config, nlgb_run** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    const auto start = std::chrono::steady_clock::now();
    auto run = std::make_unique<nlgb_run>();
    run->record = nlgb::execute_run(config->sim, config->options);
    run->analysis = nlgb::analyze(run->record);
    run->wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *out = run.release();
  });
}

void nlgb_run_destroy(nlgb_run* run) { delete run; }

nlgb_status nlgb_run_snapshot_count(const nlgb_run* run, size_t* count) {
  return guarded([&] {
    require(run != nullptr && count != nullptr, "null argument");
    *count = run->record.snapshots.size();
  });
}

nlgb_status nlgb_run_snapshot_info(const nlgb_run* run, size_t index, int64_t* t, int64_t* m_min, size_t* length) {
  return guarded([&] {
    const auto& f = snapshot(run, index);
    if (t) *t = f.t;
    if (m_min) *m_min = f.m_min;
    if (length) *length = f.size();
  });
}

nlgb_status nlgb_run_snapshot_probability(const nlgb_run* run, size_t index, double* p, size_t cap) {
  return guarded([&] {
    const auto& f = snapshot(run, index);
    require(p != nullptr, "null buffer");
    if (cap < f.size()) throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, "buffer too small");
    for (std::size_t k = 0; k < f.size(); ++k) p[k] = std::norm(f.u[k]) + std::norm(f.d[k]);
  });
}

nlgb_status nlgb_run_snapshot_amplitudes(const nlgb_run* run, size_t index, double* u_re, double* u_im,
                                         double* d_re, double* d_im, size_t cap) {
  return guarded([&] {
    const auto& f = snapshot(run, index);
    require(u_re && u_im && d_re && d_im, "null buffer");
    if (cap < f.size()) throw nlgb::Error(nlgb::ErrorCode::InvalidArgument, "buffer too small");
    for (std::size_t k = 0; k < f.size(); ++k) {
      u_re[k] = f.u[k].real();
      u_im[k] = f.u[k].imag();
      d_re[k] = f.d[k].real();
      d_im[k] = f.d[k].imag();
    }
  });
}

nlgb_status nlgb_run_max_norm_defect(const nlgb_run* run, double* defect) {
  return guarded([&] {
    require(run != nullptr && defect != nullptr, "null argument");
    double worst = 0.0;
    for (double d : run->record.norm_defect) worst = std::max(worst, d);
    *defect = worst;
  });
}

nlgb_status nlgb_run_sigma_over_t(const nlgb_run* run, int64_t t, double* value) {
  return guarded([&] {
    require(run != nullptr && value != nullptr, "null argument");
    const auto& s = run->record.sigma_over_t;
    if (t < 1 || static_cast<std::size_t>(t) > s.size())
      throw nlgb::Error(nlgb::ErrorCode::Bounds, "sigma/t is defined for 1 <= t <= steps");
    *value = s[static_cast<std::size_t>(t - 1)].sigma_over_t;
  });
}

nlgb_status nlgb_run_track_length(const nlgb_run* run, size_t* length) {
  return guarded([&] {
    require(run != nullptr && length != nullptr, "null argument");
    *length = run->record.right.series.size();
  });
}

nlgb_status nlgb_run_track_sample(const nlgb_run* run, nlgb_side side, size_t index, nlgb_track_sample* sample) {
  return guarded([&] {
    require(run != nullptr && sample != nullptr, "null argument");
    const auto& track = side == NLGB_SIDE_LEFT ? run->record.left : run->record.right;
    if (index >= track.series.size()) throw nlgb::Error(nlgb::ErrorCode::Bounds, "track index out of range");
    const auto& s = track.series[index];
    *sample = {s.t, s.valid ? 1 : 0, s.m_peak, s.m_cm, s.intensity};
  });
}

nlgb_status nlgb_run_phase(const nlgb_run* run, nlgb_phase_label* label) {
  return guarded([&] {
    require(run != nullptr && label != nullptr, "null argument");
    *label = to_c(run->analysis.classification.label);
  });
}

nlgb_status nlgb_run_collision(const nlgb_run* run, int* found, nlgb_collision* collision) {
  return guarded([&] {
    require(run != nullptr && found != nullptr, "null argument");
    const auto& c = run->analysis.collision;
    *found = c.has_value();
    if (collision) {
      *collision = {};
      if (run->analysis.t_col) collision->t_col = *run->analysis.t_col;
      if (c) *collision = {c->t_col, c->intensity_before, c->intensity_after};
    }
  });
}

nlgb_status nlgb_run_report(const nlgb_run* run, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(run != nullptr, "null run");
    copy_out(describe(run->analysis.classification, run->analysis), buf, cap, needed);
  });
}

nlgb_status nlgb_run_write_artifacts(const nlgb_run* run, const char* dir) {
  return guarded([&] {
    require(run != nullptr && dir != nullptr, "null argument");
    nlgb::write_run_artifacts(dir, run->record, run->analysis, run->wall_time_s);
  });
}

nlgb_status nlgb_sweep_create(const nlgb_config* base, double alpha_from, double alpha_to, double alpha_step,
                              int jobs, nlgb_sweep** out) {
  return guarded([&] {
    require(base != nullptr && out != nullptr, "null argument");
    require(jobs >= 1, "jobs must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    auto sweep = std::make_unique<nlgb_sweep>();
    sweep->base = base->sim;
    sweep->options = base->options;
    sweep->result = nlgb::run_sweep(base->sim, nlgb::alpha_grid(alpha_from, alpha_to, alpha_step), base->options, jobs);
    sweep->wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *out = sweep.release();
  });
}

void nlgb_sweep_destroy(nlgb_sweep* sweep) { delete sweep; }

nlgb_status nlgb_sweep_size(const nlgb_sweep* sweep, size_t* size) {
  return guarded([&] {
    require(sweep != nullptr && size != nullptr, "null argument");
    *size = sweep->result.entries.size();
  });
}

nlgb_status nlgb_sweep_entry(const nlgb_sweep* sweep, size_t index, double* alpha, int* has_t_col, int64_t* t_col,
                             nlgb_phase_label* label) {
  return guarded([&] {
    require(sweep != nullptr, "null sweep");
    if (index >= sweep->result.entries.size()) throw nlgb::Error(nlgb::ErrorCode::Bounds, "sweep index out of range");
    const auto& e = sweep->result.entries[index];
    if (alpha) *alpha = e.alpha;
    if (has_t_col) *has_t_col = e.t_col.has_value();
    if (t_col) *t_col = e.t_col.value_or(0);
    if (label) *label = to_c(e.phase);
  });
}

nlgb_status nlgb_sweep_write_artifacts(const nlgb_sweep* sweep, const char* dir) {
  return guarded([&] {
    require(sweep != nullptr && dir != nullptr, "null argument");
    nlgb::write_sweep_artifacts(dir, sweep->base, sweep->options, sweep->result, sweep->wall_time_s);
  });
}

nlgb_status nlgb_fit_hyperbola(size_t n, const double* alpha, const double* t_col, nlgb_fit_result* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    require(n == 0 || (alpha != nullptr && t_col != nullptr), "null input arrays");
    std::vector<nlgb::CollisionPoint> points;
    for (std::size_t k = 0; k < n; ++k) points.push_back({alpha[k], t_col[k]});
    *out = to_c(nlgb::fit_hyperbola(points));
  });
}

nlgb_status nlgb_fit_sweep_index(const char* path, nlgb_fit_result* out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const auto points = nlgb::collision_points(nlgb::read_sweep_index(path));
    *out = to_c(nlgb::fit_hyperbola(points));
  });
}

nlgb_status nlgb_fit_report(const nlgb_fit_result* fit, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(fit != nullptr, "null fit");
    std::ostringstream os;
    os << "points: " << fit->points << '\n'
       << "a: " << nlgb::format_double(fit->a) << '\n'
       << "b: " << nlgb::format_double(fit->b) << '\n'
       << "r2: " << nlgb::format_double(fit->r2) << '\n'
       << "alpha_I: " << nlgb::format_double(fit->alpha_I) << '\n';
    copy_out(os.str(), buf, cap, needed);
  });
}

}  // extern "C"
