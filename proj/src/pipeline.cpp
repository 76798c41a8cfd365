#include "grwalk/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "grwalk/density.hpp"
#include "grwalk/diagnostics.hpp"
#include "grwalk/error.hpp"
#include "grwalk/graphon.hpp"

namespace grwalk {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(sep, start);
    out.push_back(trim(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view s) {
  const auto v = to_double(s);
  if (!v) throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" + std::string(s) + "'");
  return *v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" + std::string(s) + "'");
}

// "name(a,b)" -> name, {a, b}
std::pair<std::string, std::vector<double>> call_syntax(std::string_view spec) {
  spec = trim(spec);
  const auto open = spec.find('(');
  if (open == std::string_view::npos) return {std::string(spec), {}};
  if (spec.back() != ')') throw ConfigError("malformed specification '" + std::string(spec) + "'");
  std::vector<double> args;
  for (auto part : split(spec.substr(open + 1, spec.size() - open - 2), ',')) {
    const auto v = to_double(part);
    if (!v) throw ConfigError("malformed argument '" + std::string(part) + "' in '" + std::string(spec) + "'");
    args.push_back(*v);
  }
  return {std::string(trim(spec.substr(0, open))), args};
}

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

ScalarFunction as_function(KernelDensity kde) {
  auto shared = std::make_shared<const KernelDensity>(std::move(kde));
  return [shared](double x) { return (*shared)(x); };
}

// Forwards warnings to the previous sink while recording them.
class WarningRecorder {
 public:
  WarningRecorder() {
    previous_ = set_warning_sink([this](std::string_view m) {
      messages_.emplace_back(m);
      if (previous_) previous_(m);
    });
  }
  ~WarningRecorder() { set_warning_sink(previous_); }
  WarningRecorder(const WarningRecorder&) = delete;
  WarningRecorder& operator=(const WarningRecorder&) = delete;
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

class Stopwatch {
 public:
  explicit Stopwatch(Json& timings) : timings_(timings) {}
  template <class F>
  auto time(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      timings_[stage] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto out = f();
      finish();
      return out;
    }
  }

 private:
  Json& timings_;
};

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "?";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

std::vector<double> SignalSeries::scaled() const {
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(), [this](double v) { return scale(v); });
  return out;
}

SignalSeries ingest_signal(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open signal file " + path.string());
  SignalSeries s;
  std::optional<std::size_t> index;
  if (!column.empty() && std::all_of(column.begin(), column.end(), [](char c) { return c >= '0' && c <= '9'; }))
    index = std::stoul(column);

  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (first) {
      first = false;
      std::size_t col = index.value_or(fields.size() - 1);
      if (!column.empty() && !index) {
        const auto it = std::find(fields.begin(), fields.end(), std::string_view(column));
        if (it == fields.end())
          throw ParseError(path.string() + ":" + std::to_string(line_no) + ": no column named '" + column + "'");
        index = static_cast<std::size_t>(it - fields.begin());
        s.name = column;
        continue;
      }
      if (col >= fields.size() || !to_double(fields[col])) {
        // header line
        if (col >= fields.size())
          throw ParseError(path.string() + ":" + std::to_string(line_no) + ": column " + std::to_string(col) +
                           " does not exist");
        index = col;
        s.name = std::string(fields[col]);
        continue;
      }
      index = col;
      s.name = "column " + std::to_string(col);
    }
    if (*index >= fields.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": missing column " + std::to_string(*index));
    const auto v = to_double(fields[*index]);
    if (!v)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                       std::string(fields[*index]) + "'");
    s.raw.push_back(*v);
  }
  if (s.raw.size() < 10)
    throw DomainError("signal " + path.string() + " has " + std::to_string(s.raw.size()) + " rows; need at least 10");
  const auto [lo, hi] = std::minmax_element(s.raw.begin(), s.raw.end());
  s.min = *lo;
  s.max = *hi;
  if (!(s.max > s.min)) throw DomainError("signal " + path.string() + " is constant; min-max scaling is undefined");
  return s;
}

Dictionary parse_dictionary(std::string_view spec, bool periodic) {
  const auto [name, args] = call_syntax(spec);
  auto as_int = [&](double v) {
    if (v != std::floor(v)) throw ConfigError("dictionary size must be an integer in '" + std::string(spec) + "'");
    return static_cast<int>(v);
  };
  if (name == "indicator" && args.size() == 1) return make_indicator(as_int(args[0]));
  if (name == "gaussian" && args.size() == 2) return make_gaussian(as_int(args[0]), args[1], periodic);
  throw ConfigError("unknown dictionary '" + std::string(spec) + "'; use gaussian(n,sigma) or indicator(n)");
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  const std::string v(value);
  if (key == "pipeline") {
    if (value == "symmetric") pipeline = Pipeline::symmetric;
    else if (value == "asymmetric") pipeline = Pipeline::asymmetric;
    else throw ConfigError("pipeline must be 'symmetric' or 'asymmetric', got '" + v + "'");
  } else if (key == "graphon") graphon = v;
  else if (key == "graphon_csv") graphon_csv = v;
  else if (key == "graphon_csv_symmetric") graphon_csv_symmetric = parse_bool(key, value);
  else if (key == "signal") signal = v;
  else if (key == "column") column = v;
  else if (key == "dictionary") dictionary = v;
  else if (key == "m") m = parse_int<std::size_t>(key, value);
  else if (key == "seed") seed = parse_int<std::uint64_t>(key, value);
  else if (key == "burn_in") burn_in = parse_int<int>(key, value);
  else if (key == "symmetrize") {
    if (value == "auto") symmetrize.reset();
    else symmetrize = parse_bool(key, value);
  } else if (key == "r") {
    if (value == "auto") r.reset();
    else r = parse_int<int>(key, value);
  } else if (key == "r_max") r_max = parse_int<int>(key, value);
  else if (key == "epsilon") {
    if (value == "auto") epsilon.reset();
    else epsilon = parse_real(key, value);
  } else if (key == "sampler") {
    if (value == "inverse") sampler = SamplerMethod::inverse_transform;
    else if (value == "rejection") sampler = SamplerMethod::rejection;
    else throw ConfigError("sampler must be 'inverse' or 'rejection', got '" + v + "'");
  } else if (key == "sde_wells") sde_wells = parse_int<int>(key, value);
  else if (key == "sde_beta") sde_beta = parse_real(key, value);
  else if (key == "sde_lag") sde_lag = parse_real(key, value);
  else if (key == "sde_dt") sde_dt = parse_real(key, value);
  else if (key == "kmeans_restarts") kmeans_restarts = parse_int<int>(key, value);
  else if (key == "reconstruction_grid") reconstruction_grid = parse_int<int>(key, value);
  else if (key == "output") output = v;
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("pipeline", pipeline == Pipeline::symmetric ? "symmetric" : "asymmetric");
  e.emplace_back("graphon", graphon);
  e.emplace_back("graphon_csv", graphon_csv.string());
  e.emplace_back("graphon_csv_symmetric", graphon_csv_symmetric ? "true" : "false");
  e.emplace_back("signal", signal.string());
  e.emplace_back("column", column);
  e.emplace_back("dictionary", dictionary);
  e.emplace_back("m", std::to_string(m));
  e.emplace_back("seed", std::to_string(seed));
  e.emplace_back("burn_in", std::to_string(burn_in));
  e.emplace_back("symmetrize", symmetrize ? (*symmetrize ? "true" : "false") : "auto");
  e.emplace_back("r", r ? std::to_string(*r) : "auto");
  e.emplace_back("r_max", std::to_string(r_max));
  e.emplace_back("epsilon", epsilon ? format_double(*epsilon) : "auto");
  e.emplace_back("sampler", sampler == SamplerMethod::inverse_transform ? "inverse" : "rejection");
  e.emplace_back("sde_wells", std::to_string(sde_wells));
  e.emplace_back("sde_beta", format_double(sde_beta));
  e.emplace_back("sde_lag", format_double(sde_lag));
  e.emplace_back("sde_dt", format_double(sde_dt));
  e.emplace_back("kmeans_restarts", std::to_string(kmeans_restarts));
  e.emplace_back("reconstruction_grid", std::to_string(reconstruction_grid));
  e.emplace_back("output", output.string());
  return e;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

RunConfig RunConfig::from_manifest(const Json& manifest) {
  if (!manifest.contains("config") || !manifest["config"].is_object())
    throw ConfigError("manifest has no config echo");
  RunConfig cfg;
  for (const auto& [k, v] : manifest["config"].items()) cfg.set(k, v.get<std::string>());
  return cfg;
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries()) os << k << " = " << v << "\n";
  return os.str();
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& [k, v] : entries()) j[k] = v;
  return j;
}

void RunConfig::validate() const {
  const int sources = (!graphon.empty()) + (!graphon_csv.empty()) + (!signal.empty());
  if (sources != 1)
    throw ConfigError("exactly one data source is required (graphon, graphon_csv or signal); got " +
                      std::to_string(sources));
  if (symmetrize.value_or(false) && pipeline != Pipeline::symmetric)
    throw ConfigError("symmetrize is only valid with the symmetric pipeline");
  if (m < 2) throw ConfigError("m must be at least 2");
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (r_max < 1) throw ConfigError("r_max must be >= 1");
  if (r && (*r < 1 || *r > r_max)) throw ConfigError("r must lie in [1, r_max]");
  if (kmeans_restarts < 1) throw ConfigError("kmeans_restarts must be >= 1");
  if (reconstruction_grid < 2) throw ConfigError("reconstruction_grid must be >= 2");
  call_syntax(dictionary);
}

bool RunConfig::symmetrize_pairs() const {
  if (symmetrize) return *symmetrize;
  return pipeline == Pipeline::symmetric && !signal.empty();
}

fs::path resolve_output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env);
  return cfg.output;
}

Trajectory acquire(const RunConfig& cfg, Json& metadata) {
  if (!cfg.signal.empty()) {
    const SignalSeries s = ingest_signal(cfg.signal, cfg.column);
    Trajectory t;
    t.states = s.scaled();
    t.seed = cfg.seed;
    t.source = "signal:" + cfg.signal.filename().string();
    metadata["scaling"] = {{"name", s.name}, {"min", s.min}, {"max", s.max}};
    return t;
  }
  if (cfg.uses_sde()) {
    SdeConfig sde;
    sde.wells = cfg.sde_wells;
    sde.beta = cfg.sde_beta;
    sde.lag = cfg.sde_lag;
    sde.dt = cfg.sde_dt;
    sde.burn_in = cfg.burn_in;
    metadata["sde"] = {{"wells", sde.wells}, {"beta", sde.beta}, {"lag", sde.lag}, {"dt", sde.dt}};
    return sde_walk(sde, cfg.m, cfg.seed);
  }
  const Graphon g = cfg.graphon_csv.empty() ? parse_builtin(cfg.graphon)
                                            : load_grid_csv(cfg.graphon_csv, cfg.graphon_csv_symmetric);
  g.validate();
  const TransitionDensity td(degree_profile(g));
  WalkOptions opts;
  opts.method = cfg.sampler;
  opts.burn_in = cfg.burn_in;
  metadata["graphon"] = g.name();
  return walk(td, cfg.m, cfg.seed, opts);
}

Analysis analyze(const Trajectory& t, const RunConfig& cfg) {
  if (t.states.size() < 2) throw DomainError("trajectory needs at least two states");
  Analysis a;
  const Dictionary dict = parse_dictionary(cfg.dictionary, t.periodic);
  const bool symmetric = cfg.pipeline == Pipeline::symmetric;
  const PairedData pd = pairs(t, symmetric && cfg.symmetrize_pairs());
  a.covariances = empirical_covariances(dict, pd);
  a.operators = galerkin_matrices(a.covariances, cfg.epsilon);
  const int n = dict.size();
  const int r_max = std::min(cfg.r_max, n);

  if (symmetric) {
    a.spectral = eigendecompose(a.operators, OperatorKind::koopman, r_max, dict);
    a.spectral.density = as_function(kde_density(as_span(pd.x), std::nullopt, t.periodic));
  } else {
    const SpectralModel probe = singular_decompose(a.operators, 1, dict);
    const int rank = std::max(1, std::min(r_max, numerical_rank(probe)));
    a.spectral = singular_decompose(a.operators, rank, dict);
    a.spectral.density = as_function(kde_density(as_span(pd.x), std::nullopt, t.periodic));
    a.spectral.target_density = as_function(kde_density(as_span(pd.y), std::nullopt, t.periodic));
  }

  const Vector values = a.spectral.values();
  a.gap = detect_gap(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
                     a.spectral.rank() + 1);
  a.r = cfg.r ? *cfg.r : a.gap.r;
  if (a.r > a.spectral.rank())
    throw RankError("requested r = " + std::to_string(a.r) + " exceeds the " + std::to_string(a.spectral.rank()) +
                    " available components");

  const Embedding e = embed(a.spectral, t, a.r);
  KMeansOptions ko;
  ko.seed = cfg.seed;
  ko.restarts = cfg.kmeans_restarts;
  a.clusters = kmeans(e, a.r, ko);
  a.transitions = cluster_transitions(a.clusters, pairs(t, false));
  return a;
}

ReconstructionSet reconstruct(const SpectralModel& sm, int r, int grid) {
  ReconstructionSet rs;
  rs.model = truncate(sm, r, 1.0);
  if (sm.mode == SpectralMode::eigen) {
    rs.p = reconstruct_p_symmetric(rs.model, grid);
    rs.w = reconstruct_w(rs.model, grid);
  } else {
    rs.p = reconstruct_p_asymmetric(rs.model, grid);
  }
  return rs;
}

void write_analysis(const fs::path& dir, const Trajectory& t, const Analysis& a) {
  fs::create_directories(dir);
  write_json(dir / "spectral_model.json", a.spectral.to_json());
  {
    auto out = open_out(dir / "spectrum.csv");
    const bool singular = a.spectral.mode == SpectralMode::singular;
    out << "index,real,imag" << (singular ? ",singular" : "") << "\n";
    for (std::size_t i = 0; i < a.spectral.eigenvalues.size(); ++i) {
      out << i + 1 << "," << format_double(a.spectral.eigenvalues[i].real()) << ","
          << format_double(a.spectral.eigenvalues[i].imag());
      if (singular) out << "," << format_double(a.spectral.singular_values[static_cast<Eigen::Index>(i)]);
      out << "\n";
    }
  }
  write_json(dir / "gap.json", {{"r", a.r},
                                {"detected_r", a.gap.r},
                                {"ratio", a.gap.ratio},
                                {"no_clear_gap", a.gap.no_clear_gap},
                                {"epsilon", a.operators.epsilon}});
  {
    auto out = open_out(dir / "clusters.csv");
    out << "step,x,label\n";
    for (std::size_t i = 0; i < t.states.size(); ++i)
      out << i << "," << format_double(t.states[i]) << "," << a.clusters.labels[i] + 1 << "\n";
  }
  write_json(dir / "cluster_model.json", {{"r", a.clusters.clusters()},
                                          {"gap_ratio", a.gap.ratio},
                                          {"seed", t.seed},
                                          {"boundaries", a.clusters.boundaries},
                                          {"periodic", a.clusters.periodic},
                                          {"inertia", a.clusters.inertia},
                                          {"restart", a.clusters.restart},
                                          {"centers", to_json(a.clusters.centers)}});
  write_matrix_csv(dir / "transitions.csv", a.transitions);
}

void write_reconstruction(const fs::path& dir, const ReconstructionSet& rs) {
  fs::create_directories(dir);
  const std::string suffix = "_rank" + std::to_string(rs.model.r) + ".csv";
  write_kernel_table(dir / ("p" + suffix), rs.p, rs.model, "p");
  if (rs.w) write_kernel_table(dir / ("w" + suffix), *rs.w, rs.model, "w");
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numeric: return 4;
  }
  return 1;
}

RunResult run(const RunConfig& cfg) {
  RunResult res;
  res.directory = resolve_output_dir(cfg);
  Json& manifest = res.manifest;
  manifest["version"] = std::string(kVersion);
  manifest["config"] = cfg.to_json();
  manifest["seed"] = cfg.seed;
  manifest["timings_ms"] = Json::object();
  Stopwatch clock(manifest["timings_ms"]);
  WarningRecorder recorder;

  auto finish = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["warnings"] = recorder.messages();
    fs::create_directories(res.directory);
    write_json(res.directory / "manifest.json", manifest);
    std::ofstream(res.directory / "config.txt") << cfg.to_text();
  };

  try {
    cfg.validate();
    fs::create_directories(res.directory);
    Json metadata = Json::object();
    res.trajectory = clock.time("acquire", [&] { return acquire(cfg, metadata); });
    write_trajectory(res.directory / "trajectory.csv", res.trajectory, metadata);
    manifest["data"] = metadata;
    res.analysis = clock.time("analyze", [&] { return analyze(res.trajectory, cfg); });
    clock.time("write_analysis", [&] { write_analysis(res.directory, res.trajectory, res.analysis); });
    const auto& sm = res.analysis.spectral;
    const bool real_components =
        sm.mode == SpectralMode::singular ||
        std::all_of(sm.eigenvalues.begin(), sm.eigenvalues.begin() + res.analysis.r,
                    [](const auto& z) { return std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z)); });
    if (real_components) {
      res.reconstruction = clock.time("reconstruct", [&] {
        return reconstruct(sm, res.analysis.r, cfg.reconstruction_grid);
      });
      write_reconstruction(res.directory, *res.reconstruction);
    } else {
      warn("leading eigenvalues are complex; rank-r reconstruction skipped (use symmetrize or the asymmetric pipeline)");
    }

    const Vector values = res.analysis.spectral.values();
    manifest["results"] = {{"r", res.analysis.r},
                           {"gap_ratio", res.analysis.gap.ratio},
                           {"no_clear_gap", res.analysis.gap.no_clear_gap},
                           {"spectral_values", to_json(values)},
                           {"transitions", to_json(res.analysis.transitions)},
                           {"boundaries", res.analysis.clusters.boundaries}};
  } catch (const Error& e) {
    manifest["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}, {"exit_code", exit_code(e)}};
    finish("error");
    throw;
  }
  finish("ok");
  return res;
}

namespace {

std::vector<std::pair<int, double>> read_labelled_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::pair<int, double>> out;
  std::string line;
  std::getline(in, line);  // header
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    const auto x = f.size() == 3 ? to_double(f[1]) : std::nullopt;
    const auto label = f.size() == 3 ? to_double(f[2]) : std::nullopt;
    if (!x || !label) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    out.emplace_back(static_cast<int>(*label), *x);
  }
  return out;
}

}  // namespace

std::vector<fs::path> emit_plot_data(const fs::path& run_dir) {
  const SpectralModel sm = SpectralModel::from_json(read_json(run_dir / "spectral_model.json"));
  const Json gap = read_json(run_dir / "gap.json");
  const int r = std::min(gap.at("r").get<int>(), sm.rank());
  const fs::path dir = run_dir / "plot";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const bool singular = sm.mode == SpectralMode::singular;

  {
    const fs::path p = dir / "spectrum.csv";
    auto out = open_out(p);
    out << "index,value\n";
    const Vector v = sm.values();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << i + 1 << "," << format_double(v[i]) << "\n";
    written.push_back(p);
  }
  {
    const fs::path p = dir / "functions.csv";
    auto out = open_out(p);
    const Vector nodes = MidpointGrid{1000}.nodes();
    const std::span<const double> xs(nodes.data(), static_cast<std::size_t>(nodes.size()));
    const Matrix right = sm.right_functions(xs, r);
    const Matrix left = singular ? sm.left_functions(xs, r) : Matrix();
    out << "x";
    for (int l = 1; l <= r; ++l) out << (singular ? ",v" : ",phi") << l;
    if (singular)
      for (int l = 1; l <= r; ++l) out << ",u" << l;
    if (sm.density) out << ",density";
    if (sm.target_density) out << ",target_density";
    out << "\n";
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      out << format_double(nodes[i]);
      for (int l = 0; l < r; ++l) out << "," << format_double(right(i, l));
      if (singular)
        for (int l = 0; l < r; ++l) out << "," << format_double(left(i, l));
      if (sm.density) out << "," << format_double(sm.density(nodes[i]));
      if (sm.target_density) out << "," << format_double(sm.target_density(nodes[i]));
      out << "\n";
    }
    written.push_back(p);
  }
  if (fs::exists(run_dir / "clusters.csv")) {
    const fs::path p = dir / "trajectory.csv";
    auto out = open_out(p);
    out << "step,x,cluster\n";
    const auto rows = read_labelled_trajectory(run_dir / "clusters.csv");
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << i << "," << format_double(rows[i].second) << "," << rows[i].first << "\n";
    written.push_back(p);
  }
  if (fs::exists(run_dir / "transitions.csv")) {
    const Matrix c = read_matrix_csv(run_dir / "transitions.csv");
    const fs::path p = dir / "transitions.csv";
    auto out = open_out(p);
    out << "from,to,probability\n";
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) out << i + 1 << "," << j + 1 << "," << format_double(c(i, j)) << "\n";
    written.push_back(p);
  }
  std::vector<fs::path> tables;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".csv" && (name.rfind("p_rank", 0) == 0 || name.rfind("w_rank", 0) == 0))
      tables.push_back(entry.path());
  }
  std::sort(tables.begin(), tables.end());
  for (const auto& source : tables) {
    const Matrix table = read_matrix_csv(source);
    const fs::path p = dir / (source.stem().string() + "_heatmap.csv");
    auto out = open_out(p);
    out << "x,y,value\n";
    const MidpointGrid grid{static_cast<int>(table.rows())};
    for (Eigen::Index i = 0; i < table.rows(); ++i)
      for (Eigen::Index j = 0; j < table.cols(); ++j)
        out << format_double(grid.node(static_cast<int>(i))) << "," << format_double(grid.node(static_cast<int>(j)))
            << "," << format_double(table(i, j)) << "\n";
    written.push_back(p);
  }
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace grwalk
