#include "nlgb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "nlgb/error.hpp"

namespace nlgb {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::int64_t parse_int(const std::string& text) {
  std::int64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) parse_error("expected an integer, got '" + text + "'");
  return value;
}

std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto with_json_errors(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    parse_error(std::string("unexpected JSON content: ") + e.what());
  }
}

Json amplitude_json(Amplitude a) { return Json::array({a.real(), a.imag()}); }
Amplitude amplitude_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Json config_to_json(const SimConfig& config) {
  Json phase;
  phase["kind"] = phase_name(config.phase);
  if (auto* k = std::get_if<KerrPhase>(&config.phase)) phase["alpha"] = k->alpha;
  if (auto* l = std::get_if<LinearPhase>(&config.phase)) phase["phi0"] = l->phi0;
  if (auto* q = std::get_if<QuadraticPhase>(&config.phase)) phase["phi0"] = q->phi0;
  if (auto* c = std::get_if<CustomPhase>(&config.phase)) phase["name"] = c->name;

  Json coin;
  if (config.coin.is_hadamard()) {
    coin["kind"] = "hadamard";
  } else {
    coin["kind"] = "matrix";
    Json entries = Json::array();
    for (const auto& e : config.coin.entries()) entries.push_back(amplitude_json(e));
    coin["entries"] = entries;
  }

  Json init;
  init["kind"] = init_name(config.init);
  if (auto* c = std::get_if<CustomInit>(&config.init)) {
    Json sites = Json::array();
    for (const auto& s : c->sites)
      sites.push_back(Json::array({s.m, s.u.real(), s.u.imag(), s.d.real(), s.d.imag()}));
    init["sites"] = sites;
  }

  Json j;
  j["phase"] = phase;
  j["coin"] = coin;
  j["init"] = init;
  j["steps"] = config.steps;
  j["record_every"] = config.record_every;
  return j;
}

SimConfig config_from_json(const Json& j) {
  return with_json_errors([&] {
    SimConfig config;
    const Json& phase = j.at("phase");
    const auto kind = phase.at("kind").get<std::string>();
    if (kind == "none") {
      config.phase = NoPhase{};
    } else if (kind == "kerr") {
      config.phase = KerrPhase{phase.at("alpha").get<double>()};
    } else if (kind == "linear") {
      config.phase = LinearPhase{phase.at("phi0").get<double>()};
    } else if (kind == "quadratic") {
      config.phase = QuadraticPhase{phase.at("phi0").get<double>()};
    } else if (kind == "custom") {
      parse_error("custom phase rule '" + phase.value("name", std::string()) + "' cannot be reconstructed from JSON");
    } else {
      parse_error("unknown phase kind '" + kind + "'");
    }

    const Json& coin = j.at("coin");
    const auto coin_kind = coin.at("kind").get<std::string>();
    if (coin_kind == "hadamard") {
      config.coin = CoinOp::hadamard();
    } else if (coin_kind == "matrix") {
      const Json& e = coin.at("entries");
      if (e.size() != 4) parse_error("coin matrix needs 4 entries");
      config.coin = CoinOp::from_matrix(amplitude_from(e[0]), amplitude_from(e[1]), amplitude_from(e[2]),
                                        amplitude_from(e[3]));
    } else {
      parse_error("unknown coin kind '" + coin_kind + "'");
    }

    const Json& init = j.at("init");
    const auto init_kind = init.at("kind").get<std::string>();
    if (init_kind == "symmetric") {
      config.init = SymmetricDelta{};
    } else if (init_kind == "updelta") {
      config.init = UpDelta{};
    } else if (init_kind == "custom") {
      CustomInit custom;
      for (const auto& s : init.at("sites")) {
        custom.sites.push_back({s.at(0).get<std::int64_t>(), {s.at(1).get<double>(), s.at(2).get<double>()},
                                {s.at(3).get<double>(), s.at(4).get<double>()}});
      }
      config.init = custom;
    } else {
      parse_error("unknown initial condition '" + init_kind + "'");
    }

    config.steps = j.at("steps").get<std::int64_t>();
    config.record_every = j.at("record_every").get<std::int64_t>();
    config.validate();
    return config;
  });
}

Json track_json(const std::vector<TrackSample>& samples) {
  Json out = Json::array();
  for (const auto& s : samples) out.push_back(Json::array({s.t, s.m_peak, s.m_cm, s.intensity}));
  return out;
}

std::vector<TrackSample> track_from(const Json& j) {
  std::vector<TrackSample> out;
  for (const auto& s : j) {
    out.push_back({s.at(0).get<std::int64_t>(), true, s.at(1).get<std::int64_t>(), s.at(2).get<double>(),
                   s.at(3).get<double>()});
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string text(buf, ptr);
  if (text.find_first_of(".e") == std::string::npos) text += ".0";
  return text;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) parse_error("expected a number, got '" + text + "'");
  return value;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

static std::string comment_header(const char* format, const std::string& config) {
  std::string out = std::string("# ") + format + "\n";
  if (!config.empty()) out += "# config: " + config + "\n";
  return out;
}

std::string distribution_csv(std::span<const ProbabilityDist> series, const std::string& config) {
  std::vector<const ProbabilityDist*> ordered;
  for (const auto& d : series) ordered.push_back(&d);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ProbabilityDist* a, const ProbabilityDist* b) { return a->t < b->t; });

  std::string out = comment_header(kDistributionFormat, config) + "t,m,p,p_u,p_d\n";
  for (const ProbabilityDist* d : ordered) {
    for (std::size_t i = 0; i < d->p.size(); ++i) {
      const std::int64_t m = d->m_min + static_cast<std::int64_t>(i);
      out += std::to_string(d->t) + ',' + std::to_string(m) + ',' + format_double(d->p[i]) + ',' +
             format_double(d->p_u[i]) + ',' + format_double(d->p_d[i]) + '\n';
    }
  }
  return out;
}

void write_distribution_csv(const std::filesystem::path& path, std::span<const ProbabilityDist> series,
                            const std::string& config) {
  write_text_file(path, distribution_csv(series, config));
}

std::vector<DistributionRow> read_distribution_csv(const std::filesystem::path& path) {
  const auto lines = content_lines(read_text_file(path));
  if (lines.empty() || lines.front() != "t,m,p,p_u,p_d") parse_error("missing distribution CSV header");
  std::vector<DistributionRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 5) parse_error("distribution row needs 5 fields: '" + lines[i] + "'");
    rows.push_back({parse_int(f[0]), parse_int(f[1]), parse_double(f[2]), parse_double(f[3]), parse_double(f[4])});
  }
  return rows;
}

std::string density_grid(std::span<const ProbabilityDist> series, const std::string& config) {
  if (series.empty()) throw Error(ErrorCode::InvalidArgument, "density grid needs at least one snapshot");
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].t <= series[i - 1].t) throw Error(ErrorCode::InvalidArgument, "snapshots must be time-ordered");
    if (i >= 2 && series[i].t - series[i - 1].t != series[1].t - series[0].t)
      throw Error(ErrorCode::InvalidArgument, "density grid needs a uniform recording schedule");
  }
  std::int64_t lo = series.front().m_min, hi = series.front().m_max();
  for (const auto& d : series) {
    if (d.empty()) continue;
    lo = std::min(lo, d.m_min);
    hi = std::max(hi, d.m_max());
  }

  std::string out = std::string("# ") + kDensityGridFormat + " rows=m(descending) columns=t cell=P_m(t)\n";
  if (!config.empty()) out += "# config: " + config + "\n";
  out += "m\\t";
  for (const auto& d : series) out += ' ' + std::to_string(d.t);
  out += '\n';
  for (std::int64_t m = hi; m >= lo; --m) {
    out += std::to_string(m);
    for (const auto& d : series) out += ' ' + format_double(d.at(m));
    out += '\n';
  }
  return out;
}

void write_density_grid(const std::filesystem::path& path, std::span<const ProbabilityDist> series,
                        const std::string& config) {
  write_text_file(path, density_grid(series, config));
}

std::string tracks_csv(const SolitonTrack& left, const SolitonTrack& right, const std::string& config) {
  std::string out = comment_header(kTracksFormat, config) + "t,side,m_peak,m_cm,intensity\n";
  for (const SolitonTrack* track : {&left, &right}) {
    const char* side = track->side == Side::Left ? "left" : "right";
    for (const auto& s : track->series) {
      if (!s.valid) continue;
      out += std::to_string(s.t) + ',' + side + ',' + std::to_string(s.m_peak) + ',' + format_double(s.m_cm) + ',' +
             format_double(s.intensity) + '\n';
    }
  }
  return out;
}

DensityGrid read_density_grid(const std::filesystem::path& path) {
  const auto lines = content_lines(read_text_file(path));
  if (lines.empty()) parse_error("empty density grid");
  DensityGrid grid;
  std::istringstream header(lines.front());
  std::string token;
  header >> token;
  if (token != "m\\t") parse_error("missing density grid header");
  while (header >> token) grid.t.push_back(parse_int(token));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    row >> token;
    grid.m.push_back(parse_int(token));
    std::vector<double> cells;
    while (row >> token) cells.push_back(parse_double(token));
    if (cells.size() != grid.t.size()) parse_error("density grid row has the wrong number of cells");
    grid.cells.push_back(std::move(cells));
  }
  return grid;
}

std::string config_json(const SimConfig& config) { return config_to_json(config).dump(); }

SimConfig parse_config_json(const std::string& text) { return config_from_json(parse_json_text(text)); }

CustomInit read_init_file(const std::filesystem::path& path) {
  CustomInit init;
  for (const auto& line : content_lines(read_text_file(path))) {
    std::istringstream in(line.substr(0, line.find('#')));
    std::vector<std::string> f;
    std::string token;
    while (in >> token) f.push_back(token);
    if (f.empty()) continue;
    if (f.size() != 5) parse_error("initial-condition line needs 'm u_re u_im d_re d_im': '" + line + "'");
    init.sites.push_back({parse_int(f[0]), {parse_double(f[1]), parse_double(f[2])},
                          {parse_double(f[3]), parse_double(f[4])}});
  }
  if (init.sites.empty()) parse_error("initial-condition file '" + path.string() + "' lists no sites");
  return init;
}

std::string platform_note() {
  std::ostringstream note;
#if defined(__linux__)
  note << "linux";
#elif defined(__APPLE__)
  note << "macos";
#elif defined(_WIN32)
  note << "windows";
#else
  note << "unknown-os";
#endif
#if defined(__x86_64__) || defined(_M_X64)
  note << "-x86_64";
#elif defined(__aarch64__)
  note << "-aarch64";
#endif
#if defined(__clang__)
  note << " clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  note << " gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  note << " binary64";
  return note.str();
}

std::string manifest_json(const RunManifest& manifest) {
  Json j;
  j["schema"] = kManifestSchema;
  j["format_version"] = manifest.format_version;
  j["config"] = config_to_json(manifest.config);
  j["analysis"] = Json{{"halfwidth", manifest.halfwidth}};
  j["artifacts"] = manifest.artifacts;
  j["wall_time_s"] = manifest.wall_time_s;
  j["platform"] = manifest.platform;
  if (!manifest.sweep_alphas.empty()) j["sweep_alphas"] = manifest.sweep_alphas;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest_json(const std::string& text) {
  const Json j = parse_json_text(text);
  return with_json_errors([&] {
    if (j.at("schema").get<std::string>() != kManifestSchema) parse_error("not an nlgb run manifest");
    RunManifest m;
    m.format_version = j.at("format_version").get<std::string>();
    m.config = config_from_json(j.at("config"));
    m.halfwidth = j.at("analysis").at("halfwidth").get<int>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.wall_time_s = j.at("wall_time_s").get<double>();
    m.platform = j.at("platform").get<std::string>();
    if (j.contains("sweep_alphas")) m.sweep_alphas = j.at("sweep_alphas").get<std::vector<double>>();
    return m;
  });
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  write_text_file(path, manifest_json(manifest));
}

RunManifest read_manifest(const std::filesystem::path& path) { return parse_manifest_json(read_text_file(path)); }

std::optional<double> kerr_alpha(const SimConfig& config) {
  if (auto* k = std::get_if<KerrPhase>(&config.phase)) return k->alpha;
  return std::nullopt;
}

std::string summary_json(const RunSummary& s) {
  Json j;
  j["schema"] = kSummarySchema;
  j["config"] = config_to_json(s.config);
  j["halfwidth"] = s.halfwidth;
  j["phase"] = phase_code(s.phase.phase);
  if (s.phase.phase == Phase::Chaotic) {
    j["behavior"] = behavior_code(s.phase.behavior);
    if (s.phase.behavior == ChaoticBehavior::Localized) j["m_eq"] = s.phase.m_eq;
  }
  Json tracks;
  tracks["stride"] = s.track_stride;
  tracks["columns"] = Json::array({"t", "m_peak", "m_cm", "intensity"});
  tracks["right"] = track_json(s.right_track);
  tracks["left"] = track_json(s.left_track);
  j["tracks"] = tracks;
  if (s.collision) {
    j["collision"] = Json{{"t_col", s.collision->t_col},
                          {"intensity_before", s.collision->intensity_before},
                          {"intensity_after", s.collision->intensity_after}};
  }
  Json sig;
  sig["stride"] = s.sigma_stride;
  Json ts = Json::array(), vs = Json::array();
  for (const auto& x : s.sigma_over_t) {
    ts.push_back(x.t);
    vs.push_back(x.sigma_over_t);
  }
  sig["t"] = ts;
  sig["value"] = vs;
  j["sigma_over_t"] = sig;
  Json fit;
  if (auto a = kerr_alpha(s.config)) fit["alpha"] = *a; else fit["alpha"] = nullptr;
  if (s.t_col) fit["t_col"] = *s.t_col; else fit["t_col"] = nullptr;
  j["fit_input"] = fit;
  return j.dump(2) + "\n";
}

RunSummary parse_summary_json(const std::string& text) {
  const Json j = parse_json_text(text);
  return with_json_errors([&] {
    if (j.at("schema").get<std::string>() != kSummarySchema) parse_error("not an nlgb run summary");
    RunSummary s;
    s.config = config_from_json(j.at("config"));
    s.halfwidth = j.at("halfwidth").get<int>();
    s.phase.phase = parse_phase_code(j.at("phase").get<std::string>());
    if (j.contains("behavior")) s.phase.behavior = parse_behavior_code(j.at("behavior").get<std::string>());
    if (j.contains("m_eq")) s.phase.m_eq = j.at("m_eq").get<double>();
    const Json& tracks = j.at("tracks");
    s.track_stride = tracks.at("stride").get<std::int64_t>();
    s.right_track = track_from(tracks.at("right"));
    s.left_track = track_from(tracks.at("left"));
    if (j.contains("collision")) {
      const Json& c = j.at("collision");
      s.collision = CollisionEvent{c.at("t_col").get<std::int64_t>(), c.at("intensity_before").get<double>(),
                                   c.at("intensity_after").get<double>()};
    }
    const Json& sig = j.at("sigma_over_t");
    s.sigma_stride = sig.at("stride").get<std::int64_t>();
    const Json& ts = sig.at("t");
    const Json& vs = sig.at("value");
    if (ts.size() != vs.size()) parse_error("sigma_over_t columns differ in length");
    for (std::size_t i = 0; i < ts.size(); ++i) s.sigma_over_t.push_back({ts[i].get<std::int64_t>(), vs[i].get<double>()});
    const Json& fit = j.at("fit_input");
    if (!fit.at("t_col").is_null()) s.t_col = fit.at("t_col").get<std::int64_t>();
    return s;
  });
}

void write_summary_json(const std::filesystem::path& path, const RunSummary& summary) {
  write_text_file(path, summary_json(summary));
}

RunSummary read_summary_json(const std::filesystem::path& path) { return parse_summary_json(read_text_file(path)); }

std::string sweep_index_csv(std::span<const SweepEntry> entries) {
  std::string out = std::string("# ") + kSweepIndexFormat + "\n" + "alpha,t_col,phase,behavior,summary\n";
  for (const auto& e : entries) {
    out += format_double(e.alpha) + ',' + (e.t_col ? std::to_string(*e.t_col) : std::string()) + ',' +
           phase_code(e.phase.phase) + ',' + behavior_code(e.phase.behavior) + ',' + e.summary_file + '\n';
  }
  return out;
}

void write_sweep_index(const std::filesystem::path& path, std::span<const SweepEntry> entries) {
  write_text_file(path, sweep_index_csv(entries));
}

std::vector<SweepEntry> read_sweep_index(const std::filesystem::path& path) {
  const auto lines = content_lines(read_text_file(path));
  if (lines.empty()) parse_error("empty sweep index");
  const auto header = split(lines.front(), ',');
  if (header.size() < 2 || header[0] != "alpha" || header[1] != "t_col")
    parse_error("sweep index must start with columns alpha,t_col");
  std::vector<SweepEntry> entries;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() < 2) parse_error("sweep index row needs alpha and t_col: '" + lines[i] + "'");
    SweepEntry e;
    e.alpha = parse_double(f[0]);
    if (!f[1].empty()) e.t_col = parse_int(f[1]);
    if (f.size() > 2 && !f[2].empty()) e.phase.phase = parse_phase_code(f[2]);
    if (f.size() > 3) e.phase.behavior = parse_behavior_code(f[3]);
    if (f.size() > 4) e.summary_file = f[4];
    entries.push_back(e);
  }
  return entries;
}

}  // namespace nlgb
