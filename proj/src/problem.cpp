#include "kolmofix/problem.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kolmofix/error.hpp"

namespace kolmofix {
namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, Entry> split_lines(const std::string& text) {
  std::map<std::string, Entry> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // Strip a comment that is not inside quotes.
    bool quoted = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    const std::string body = raw.substr(0, cut);
    if (trim(body).empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected `key = value`", line, 1);
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    const int column = static_cast<int>(body.find_first_not_of(" \t", eq + 1) + 1);
    if (key.empty()) throw ParseError("missing key", line, 1);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
      throw ParseError("unterminated string", line, column);
    }
    if (out.count(key)) throw ParseError("duplicate key '" + key + "'", line, 1);
    out[key] = {value, line, column};
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry* get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Entry* e = get(key);
    return e ? e->value : fallback;
  }

  double number(const std::string& key, double fallback) {
    const Entry* e = get(key);
    if (!e) return fallback;
    double v = 0.0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw ParseError("'" + key + "' expects a number", e->line, e->column);
    return v;
  }

  long integer(const std::string& key, long fallback) {
    const Entry* e = get(key);
    if (!e) return fallback;
    long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) throw ParseError("'" + key + "' expects an integer", e->line, e->column);
    return v;
  }

  Function function(const std::string& key) {
    const Entry* e = get(key);
    if (!e) return {};
    try {
      return Function::parse(e->value);
    } catch (const ParseError& p) {
      throw ParseError("in '" + key + "': " + p.detail, e->line, e->column + p.column - 1);
    }
  }

  std::string expression(const std::string& key) {
    const Entry* e = get(key);
    if (!e) return "";
    try {
      parse_expr(e->value);
    } catch (const ParseError& p) {
      throw ParseError("in '" + key + "': " + p.detail, e->line, e->column + p.column - 1);
    }
    return e->value;
  }

  void reject_unknown() const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) throw ParseError("unknown key '" + key + "'", e.line, 1);
    }
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("truncation.levels expects comma-separated integers, got '" + s + "'");
    }
  }
  return out;
}

}  // namespace

DiscreteMeasure Problem::initial_measure() const {
  const int d = dim;
  if (init.kind == "dirac") return DiscreteMeasure::dirac(std::vector<double>(static_cast<std::size_t>(d), init.mean));
  if (init.kind == "sample") {
    return gaussian_sample(d, init.n ? init.n : 10000, init.mean, init.sd, picard.sde.seed);
  }
  if (init.kind == "gaussian") {
    const int cells = init.n ? static_cast<int>(init.n) : (d == 1 ? 400 : 100);
    std::vector<Axis> axes(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      axes[static_cast<std::size_t>(i)] = {domain.lower[static_cast<std::size_t>(i)], domain.upper[static_cast<std::size_t>(i)], cells};
    }
    return gaussian_grid(axes, init.mean, init.sd).to_measure(true);
  }
  throw ConfigError("init.kind must be gaussian, sample or dirac");
}

Cube Problem::check_cube() const {
  Cube K;
  K.lower.assign(static_cast<std::size_t>(dim), checks.lower);
  K.upper.assign(static_cast<std::size_t>(dim), checks.upper);
  return K;
}

Problem parse_problem(const std::string& text) {
  Reader r(split_lines(text));
  Problem p;
  p.name = r.text("name", "problem");
  p.dim = static_cast<int>(r.integer("dim", 1));
  if (p.dim < 1 || p.dim > kMaxDim) throw ConfigError("dim must be between 1 and " + std::to_string(kMaxDim));
  p.m = static_cast<int>(r.integer("m", p.dim));
  const int d = p.dim;

  p.a.assign(static_cast<std::size_t>(d * d), "");
  p.b.assign(static_cast<std::size_t>(d), "");
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) {
      p.a[static_cast<std::size_t>((i - 1) * d + j - 1)] =
          r.expression("a[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    p.b[static_cast<std::size_t>(i - 1)] = r.expression("b[" + std::to_string(i) + "]");
  }
  p.field = std::make_shared<ExprField>(d, p.m, p.a, p.b);

  p.lyap.V = r.function("V");
  p.lyap.W = r.function("W");
  p.lyap.H = r.function("H");
  if (p.lyap.V.valid() && p.lyap.V.measure_dependent()) throw ConfigError("V must not depend on the measure");
  if (p.lyap.H.valid() && p.lyap.H.measure_dependent()) throw ConfigError("H must not depend on the measure");
  p.lyap.C = r.number("lyapunov.C", 1.0);
  p.lyap.Lambda = r.number("lyapunov.Lambda", 1.0);
  p.lyap.C1 = r.number("lyapunov.C1", 0.0);
  p.lyap.C2 = r.number("lyapunov.C2", 0.0);
  p.eps = r.number("lyapunov.eps", 0.1);
  if (!(p.lyap.Lambda > 0.0)) throw ConfigError("lyapunov.Lambda must be positive");

  const double lo = r.number("domain.lower", -8.0);
  const double hi = r.number("domain.upper", 8.0);
  if (!(hi > lo)) throw ConfigError("domain.upper must exceed domain.lower");
  p.domain.lower.assign(static_cast<std::size_t>(d), lo);
  p.domain.upper.assign(static_cast<std::size_t>(d), hi);

  PicardConfig& pc = p.picard;
  pc.backend = parse_backend(r.text("solver.backend", "grid"));
  const long cells = r.integer("solver.cells", d == 1 ? 400 : 100);
  if (cells < 2) throw ConfigError("solver.cells must be at least 2");
  pc.axes.assign(static_cast<std::size_t>(d), Axis{lo, hi, static_cast<int>(cells)});
  pc.sde.dt = r.number("solver.dt", pc.sde.dt);
  pc.sde.T = r.number("solver.T", pc.sde.T);
  pc.sde.burn_in = r.number("solver.burn_in", pc.sde.burn_in);
  const long particles = r.integer("solver.particles", static_cast<long>(pc.sde.particles));
  const long snapshots = r.integer("solver.snapshots", static_cast<long>(pc.sde.snapshots));
  const long seed = r.integer("solver.seed", static_cast<long>(pc.sde.seed));
  const long threads = r.integer("solver.threads", 1);
  if (particles < 1 || snapshots < 1 || seed < 0 || threads < 1) {
    throw ConfigError("solver.particles, .snapshots and .threads must be positive and solver.seed nonnegative");
  }
  pc.sde.particles = static_cast<std::size_t>(particles);
  pc.sde.snapshots = static_cast<std::size_t>(snapshots);
  pc.sde.seed = static_cast<std::uint64_t>(seed);
  pc.sde.threads = static_cast<unsigned>(threads);
  pc.sde.guard = r.number("solver.guard", pc.sde.guard);
  pc.theta = r.number("picard.theta", pc.theta);
  pc.max_iter = static_cast<int>(r.integer("picard.max_iter", pc.max_iter));
  pc.tol = r.number("picard.tol", pc.tol);
  pc.R = r.number("picard.R", pc.R);
  const long atoms = r.integer("picard.max_atoms", static_cast<long>(pc.max_atoms));
  if (atoms < 16) throw ConfigError("picard.max_atoms must be at least 16");
  pc.max_atoms = static_cast<std::size_t>(atoms);
  pc.V = p.lyap.V;
  pc.validate();

  p.init.kind = r.text("init.kind", "gaussian");
  p.init.mean = r.number("init.mean", 0.0);
  p.init.sd = r.number("init.sd", 1.0);
  const long n = r.integer("init.n", 0);
  if (n < 0) throw ConfigError("init.n must be nonnegative");
  p.init.n = static_cast<std::size_t>(n);
  if (p.init.kind != "gaussian" && p.init.kind != "sample" && p.init.kind != "dirac") {
    throw ConfigError("init.kind must be gaussian, sample or dirac");
  }
  if (!(p.init.sd > 0.0)) throw ConfigError("init.sd must be positive");

  if (r.has("truncation.levels")) {
    p.has_truncation = true;
    p.truncation.levels = int_list(r.text("truncation.levels", ""));
  }
  const std::string comp = r.text("truncation.compensate", "origin-atom");
  if (comp != "origin-atom" && comp != "none") throw ConfigError("truncation.compensate must be origin-atom or none");
  p.truncation.compensate = comp == "origin-atom";
  p.truncation.M = r.number("truncation.M", p.truncation.M);

  CheckSpec& c = p.checks;
  c.lower = r.number("checks.lower", c.lower);
  c.upper = r.number("checks.upper", c.upper);
  if (!(c.upper > c.lower)) throw ConfigError("checks.upper must exceed checks.lower");
  c.resolution = static_cast<int>(r.integer("checks.resolution", c.resolution));
  c.pairs = static_cast<std::size_t>(r.integer("checks.pairs", static_cast<long>(c.pairs)));
  c.clouds = static_cast<std::size_t>(r.integer("checks.clouds", static_cast<long>(c.clouds)));
  c.cloud_atoms = static_cast<std::size_t>(r.integer("checks.cloud_atoms", static_cast<long>(c.cloud_atoms)));
  c.cloud_width = r.number("checks.cloud_width", c.cloud_width);
  c.seed = static_cast<std::uint64_t>(r.integer("checks.seed", static_cast<long>(c.seed)));
  c.grid = static_cast<int>(r.integer("checks.grid", c.grid));
  if (c.resolution < 2 || c.grid < 2 || c.cloud_atoms < 1) throw ConfigError("checks resolutions must be at least 2");

  RegularityConfig& rc = p.projection;
  rc.window.m = std::max(1, p.m);
  const int mz = d - rc.window.m;
  const double ky_lo = r.number("projection.ky_lower", -1.0);
  const double ky_hi = r.number("projection.ky_upper", 1.0);
  const double eta_lo = r.number("projection.eta_lower", -6.0);
  const double eta_hi = r.number("projection.eta_upper", 6.0);
  rc.window.eta.ramp = r.number("projection.ramp", 1.0);
  rc.window.r = r.number("projection.r", 2.0);
  rc.window.S = r.number("projection.S", 10.0);
  rc.gamma = r.number("projection.gamma", 1.0);
  rc.window.ky_lower.assign(static_cast<std::size_t>(rc.window.m), ky_lo);
  rc.window.ky_upper.assign(static_cast<std::size_t>(rc.window.m), ky_hi);
  rc.window.qy_lower.assign(static_cast<std::size_t>(rc.window.m), ky_lo - 1.5);
  rc.window.qy_upper.assign(static_cast<std::size_t>(rc.window.m), ky_hi + 1.5);
  rc.window.eta.lo.assign(static_cast<std::size_t>(std::max(mz, 0)), eta_lo);
  rc.window.eta.hi.assign(static_cast<std::size_t>(std::max(mz, 0)), eta_hi);

  r.reject_unknown();
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "': file not found or unreadable");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

}  // namespace kolmofix
