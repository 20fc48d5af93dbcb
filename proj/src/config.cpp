#include "pdh/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace pdh {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& key) {
  static const std::regex re(R"([A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*)");
  return std::regex_match(key, re);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double x = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || std::isnan(x))
    throw ConfigError(key, "expected a decimal number, got '" + text + "'");
  return x;
}

// ---------------------------------------------------------------------------

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string prefix;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "unterminated section header");
      const std::string section = trim(line.substr(1, line.size() - 2));
      if (!section.empty() && !valid_key(section)) throw ConfigError(where, "bad section name '" + section + "'");
      prefix = section.empty() ? "" : section + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = prefix + trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where, "bad key '" + key + "'");
    if (doc.has(key)) throw ConfigError(key, "duplicate key");
    doc.values_[key] = trim(line.substr(eq + 1));
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ConfigDocument::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

const std::string& ConfigDocument::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing key");
  return it->second;
}

void ConfigDocument::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ConfigError(key, "bad key");
  if (value.find('\n') != std::string::npos || value.find('#') != std::string::npos)
    throw ConfigError(key, "value cannot hold newlines or '#'");
  values_[key] = trim(value);
}

// ---------------------------------------------------------------------------

const std::string* ConfigReader::lookup(const std::string& key) {
  used_.insert(key);
  return doc_.has(key) ? &doc_.get(key) : nullptr;
}

double ConfigReader::number(const std::string& key, double fallback) {
  const auto* v = lookup(key);
  return v ? parse_number(*v, key) : fallback;
}

int ConfigReader::integer(const std::string& key, int fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  const double x = parse_number(*v, key);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key, "expected an integer, got '" + *v + "'");
  return static_cast<int>(x);
}

std::uint64_t ConfigReader::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  std::uint64_t x = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), x);
  if (v->empty() || res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw ConfigError(key, "expected a nonnegative integer, got '" + *v + "'");
  return x;
}

bool ConfigReader::flag(const std::string& key, bool fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + *v + "'");
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
  const auto* v = lookup(key);
  return v ? *v : fallback;
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
  const auto* v = lookup(key);
  std::vector<double> out;
  if (!v) return out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_number(item, key));
  return out;
}

std::vector<std::string> ConfigReader::items(const std::string& key) {
  const auto* v = lookup(key);
  return v ? split(*v, ';') : std::vector<std::string>{};
}

void ConfigReader::finish() const {
  for (const auto& [k, v] : doc_.entries())
    if (!used_.count(k)) throw ConfigError(k, "unknown key");
}

// ---------------------------------------------------------------------------

std::string NormColumn::label() const {
  std::string prefix = component == Component::first ? "u." : component == Component::second ? "v." : "";
  const char* s = side == Side::low ? "low" : side == Side::high ? "high" : "full";
  return prefix + "B[" + format_number(spec.s) + "," + format_number(spec.p) + "," + format_number(spec.r) + "][" +
         s + "," + std::to_string(J) + "]";
}

NormColumn NormColumn::parse(const std::string& text) {
  static const std::regex re(R"(^(?:([uv])\.)?B\[([^,\]]+),([^,\]]+),([^,\]]+)\]\[(full|low|high),([+-]?\d+)\]$)");
  std::string t;
  std::remove_copy_if(text.begin(), text.end(), std::back_inserter(t), [](char c) { return c == ' ' || c == '\t'; });
  std::smatch m;
  if (!std::regex_match(t, m, re))
    throw ConfigError("norm", "expected B[s,p,r][side,J] with an optional u. or v. prefix, got '" + text + "'");
  NormColumn c;
  if (m[1] == "u") c.component = Component::first;
  if (m[1] == "v") c.component = Component::second;
  c.spec = {parse_number(m[2], "norm"), parse_number(m[3], "norm"), parse_number(m[4], "norm")};
  c.side = m[5] == "low" ? Side::low : m[5] == "high" ? Side::high : Side::full;
  c.J = std::stoi(m[6]);
  if (!std::isfinite(c.spec.s)) throw ConfigError("norm", "regularity must be finite");
  if (!(c.spec.p >= 1.0)) throw ConfigError("norm", "Lebesgue exponent must be >= 1");
  if (!(c.spec.r >= 1.0)) throw ConfigError("norm", "summation exponent must be >= 1");
  return c;
}

// ---------------------------------------------------------------------------

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::toy: return "toy";
    case ModelKind::euler: return "euler";
    case ModelKind::general: return "general";
  }
  return "?";
}

std::string to_string(VelocityProfile profile) {
  switch (profile) {
    case VelocityProfile::random: return "random";
    case VelocityProfile::zero: return "zero";
    case VelocityProfile::darcy: return "darcy";
  }
  return "?";
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::sigma1: return "sigma1";
    case SweepAxis::amplitude: return "amplitude";
    case SweepAxis::k: return "k";
  }
  return "?";
}

double torus_window(const GridSpec& grid) {
  const double xi = grid.fundamental();
  return -std::log(0.8) / (xi * xi);
}

void RunConfig::validate() const {
  static const std::regex name_re(R"([A-Za-z0-9_.-]+)");
  if (!std::regex_match(name, name_re)) throw ConfigError("name", "must be a nonempty file-name-safe word");

  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("model.lambda", "must be positive");
  if (!nonlinear && model != ModelKind::toy)
    throw ConfigError("model.nonlinear", "only the toy model has a linear variant");
  if (model == ModelKind::euler && !(gamma >= 1.0)) throw ConfigError("model.gamma", "must be >= 1");
  if (model == ModelKind::general) {
    if (!(alpha > 0.0)) throw ConfigError("model.alpha", "must be positive");
    if (!(beta > 0.0)) throw ConfigError("model.beta", "must be positive");
    if (!(kappa >= 0.0)) throw ConfigError("model.kappa", "must be nonnegative");
    if (q < 2 || q > 4) throw ConfigError("model.q", "must lie in [2, 4]");
  }

  if (log2_points < 3 || log2_points > 24) throw ConfigError("grid.log2_points", "must lie in [3, 24]");
  if (log2_periods < -8 || log2_periods > 16) throw ConfigError("grid.log2_periods", "must lie in [-8, 16]");

  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("data.amplitude", "must be nonnegative");
  if (!std::isfinite(envelope.s_low)) throw ConfigError("data.s_low", "must be finite");
  if (!std::isfinite(envelope.s_high)) throw ConfigError("data.s_high", "must be finite");
  if (!(envelope.tilt >= 0.0)) throw ConfigError("data.tilt", "must be nonnegative");
  if (!(envelope.band_min >= 0.0)) throw ConfigError("data.band_min", "must be nonnegative");
  if (!(envelope.band_max > envelope.band_min)) throw ConfigError("data.band_max", "must exceed data.band_min");

  if (!(horizon > 0.0)) throw ConfigError("integrator.horizon", "must be positive");
  const double window = torus_window(grid());
  if (horizon > window)
    throw ConfigError("integrator.horizon", "exceeds the torus window t_spec = " + format_number(window));
  if (!(snapshot > 0.0) || snapshot > horizon)
    throw ConfigError("integrator.snapshot", "must lie in (0, horizon]");
  if (!(cfl > 0.0) || cfl > kSspRk3StabilityCfl)
    throw ConfigError("integrator.cfl", "must lie in (0, " + format_number(kSspRk3StabilityCfl) + "]");
  if (!(relaxation >= 0.0)) throw ConfigError("integrator.relaxation", "must be nonnegative");
  if (!(dt >= 0.0)) throw ConfigError("integrator.dt", "must be nonnegative");
  if (dt > 0.0) {
    const double ratio = snapshot / dt;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      throw ConfigError("integrator.dt", "must divide integrator.snapshot");
  }

  if (!(p >= 2.0 && p <= 4.0)) throw ConfigError("analysis.p", "must lie in [2, 4]");
  if (!(eta > 0.0)) throw ConfigError("analysis.eta", "must be positive");
  if (!(sigma1 > -0.5 && sigma1 <= 0.5)) throw ConfigError("analysis.sigma1", "must lie in (-1/2, 1/2]");
  if (!(sigma >= -sigma1 && sigma <= 0.5)) throw ConfigError("analysis.sigma", "must lie in [-sigma1, 1/2]");
  if (!(window_start >= 0.0)) throw ConfigError("analysis.window_start", "must be nonnegative");
  if (!(window_end == 0.0 || window_end > window_start))
    throw ConfigError("analysis.window_end", "must be 0 or exceed analysis.window_start");
  if (!(decay_tolerance > 0.0)) throw ConfigError("analysis.decay_tolerance", "must be positive");
  if (!(high_slope_margin >= 0.0)) throw ConfigError("analysis.high_slope_margin", "must be nonnegative");
  if (!(lyapunov_tolerance >= 0.0)) throw ConfigError("analysis.lyapunov_tolerance", "must be nonnegative");

  const auto d = DyadicDecomposition::build(CutoffProfile(), grid());
  const int J = j_threshold(lambda, k);
  if (J < d.j_min() - 1 || J > d.j_max()) throw ConfigError("analysis.k", "threshold falls outside the grid's blocks");
  if (J0 < d.j_min() - 1 || J0 > d.j_max()) throw ConfigError("analysis.J0", "outside the grid's blocks");
  for (const auto& c : norms)
    if (c.J < d.j_min() - 1 || c.J > d.j_max())
      throw ConfigError("analysis.norms", c.label() + " cuts outside the grid's blocks");
}

RunConfig parse_run_config(const ConfigDocument& doc) {
  ConfigReader in(doc);
  RunConfig c;
  c.name = in.text("name", c.name);

  const std::string kind = in.text("model.kind", "toy");
  if (kind == "toy") c.model = ModelKind::toy;
  else if (kind == "euler") c.model = ModelKind::euler;
  else if (kind == "general") c.model = ModelKind::general;
  else throw ConfigError("model.kind", "expected toy, euler or general, got '" + kind + "'");
  c.lambda = in.number("model.lambda", c.lambda);
  c.nonlinear = in.flag("model.nonlinear", c.nonlinear);
  c.gamma = in.number("model.gamma", c.gamma);
  c.alpha = in.number("model.alpha", c.alpha);
  c.beta = in.number("model.beta", c.beta);
  c.kappa = in.number("model.kappa", c.kappa);
  c.q = in.integer("model.q", c.q);
  c.v1 = in.number("model.v1", c.v1);
  c.v2 = in.number("model.v2", c.v2);
  c.w1u = in.number("model.w1u", c.w1u);
  c.w1v = in.number("model.w1v", c.w1v);
  c.w2u = in.number("model.w2u", c.w2u);
  c.w2v = in.number("model.w2v", c.w2v);

  c.log2_points = in.integer("grid.log2_points", c.log2_points);
  c.log2_periods = in.integer("grid.log2_periods", c.log2_periods);

  c.amplitude = in.number("data.amplitude", c.amplitude);
  c.seed = in.unsigned_integer("data.seed", c.seed);
  c.envelope.s_low = in.number("data.s_low", c.envelope.s_low);
  c.envelope.s_high = in.number("data.s_high", c.envelope.s_high);
  c.envelope.J_split = in.integer("data.split", c.envelope.J_split);
  c.envelope.tilt = in.number("data.tilt", c.envelope.tilt);
  c.envelope.band_min = in.number("data.band_min", c.envelope.band_min);
  c.envelope.band_max = in.number("data.band_max", c.envelope.band_max);
  const std::string vel = in.text("data.velocity", "random");
  if (vel == "random") c.velocity = VelocityProfile::random;
  else if (vel == "zero") c.velocity = VelocityProfile::zero;
  else if (vel == "darcy") c.velocity = VelocityProfile::darcy;
  else throw ConfigError("data.velocity", "expected random, zero or darcy, got '" + vel + "'");

  c.dt = in.number("integrator.dt", c.dt);
  c.cfl = in.number("integrator.cfl", c.cfl);
  c.relaxation = in.number("integrator.relaxation", c.relaxation);
  c.horizon = in.number("integrator.horizon", c.horizon);
  c.snapshot = in.number("integrator.snapshot", c.snapshot);

  for (const auto& item : in.items("analysis.norms")) {
    try {
      c.norms.push_back(NormColumn::parse(item));
    } catch (const ConfigError& e) {
      throw ConfigError("analysis.norms", e.what());
    }
  }
  c.p = in.number("analysis.p", c.p);
  c.k = in.integer("analysis.k", c.k);
  c.J0 = in.integer("analysis.J0", c.J0);
  c.eta = in.number("analysis.eta", c.eta);
  c.sigma1 = in.number("analysis.sigma1", c.sigma1);
  c.sigma = in.number("analysis.sigma", c.sigma);
  c.window_start = in.number("analysis.window_start", c.window_start);
  c.window_end = in.number("analysis.window_end", c.window_end);
  c.decay_tolerance = in.number("analysis.decay_tolerance", c.decay_tolerance);
  c.high_slope_margin = in.number("analysis.high_slope_margin", c.high_slope_margin);
  c.lyapunov_tolerance = in.number("analysis.lyapunov_tolerance", c.lyapunov_tolerance);

  c.write_trajectory = in.flag("output.trajectory", c.write_trajectory);

  in.finish();
  c.validate();
  return c;
}

ConfigDocument to_document(const RunConfig& c) {
  ConfigDocument d;
  auto num = [&](const std::string& k, double x) { d.set(k, format_number(x)); };
  d.set("name", c.name);
  d.set("model.kind", to_string(c.model));
  num("model.lambda", c.lambda);
  d.set("model.nonlinear", c.nonlinear ? "true" : "false");
  if (c.model == ModelKind::euler) num("model.gamma", c.gamma);
  if (c.model == ModelKind::general) {
    num("model.alpha", c.alpha);
    num("model.beta", c.beta);
    num("model.kappa", c.kappa);
    num("model.q", c.q);
    num("model.v1", c.v1);
    num("model.v2", c.v2);
    num("model.w1u", c.w1u);
    num("model.w1v", c.w1v);
    num("model.w2u", c.w2u);
    num("model.w2v", c.w2v);
  }
  num("grid.log2_points", c.log2_points);
  num("grid.log2_periods", c.log2_periods);
  num("data.amplitude", c.amplitude);
  d.set("data.seed", std::to_string(c.seed));
  num("data.s_low", c.envelope.s_low);
  num("data.s_high", c.envelope.s_high);
  num("data.split", c.envelope.J_split);
  num("data.tilt", c.envelope.tilt);
  num("data.band_min", c.envelope.band_min);
  num("data.band_max", c.envelope.band_max);
  d.set("data.velocity", to_string(c.velocity));
  num("integrator.dt", c.dt);
  num("integrator.cfl", c.cfl);
  num("integrator.relaxation", c.relaxation);
  num("integrator.horizon", c.horizon);
  num("integrator.snapshot", c.snapshot);
  if (!c.norms.empty()) {
    std::string list;
    for (const auto& n : c.norms) list += (list.empty() ? "" : "; ") + n.label();
    d.set("analysis.norms", list);
  }
  num("analysis.p", c.p);
  num("analysis.k", c.k);
  num("analysis.J0", c.J0);
  num("analysis.eta", c.eta);
  num("analysis.sigma1", c.sigma1);
  num("analysis.sigma", c.sigma);
  num("analysis.window_start", c.window_start);
  num("analysis.window_end", c.window_end);
  num("analysis.decay_tolerance", c.decay_tolerance);
  num("analysis.high_slope_margin", c.high_slope_margin);
  num("analysis.lyapunov_tolerance", c.lyapunov_tolerance);
  d.set("output.trajectory", c.write_trajectory ? "true" : "false");
  return d;
}

// ---------------------------------------------------------------------------

RunConfig SweepConfig::cell(std::size_t i) const {
  if (i >= values.size()) throw IndexError("sweep cell " + std::to_string(i) + " out of range");
  RunConfig c = base;
  const double x = values[i];
  switch (axis) {
    case SweepAxis::lambda: c.lambda = x; break;
    case SweepAxis::sigma1:
      c.sigma1 = x;
      c.envelope.s_low = -x;
      break;
    case SweepAxis::amplitude: c.amplitude = x; break;
    case SweepAxis::k: c.k = static_cast<int>(x); break;
  }
  c.name = base.name + "_" + to_string(axis) + "_" + std::to_string(i);
  return c;
}

void SweepConfig::validate() const {
  if (values.empty()) throw ConfigError("sweep.values", "axis needs at least one value");
  if (parallelism < 1) throw ConfigError("sweep.parallelism", "must be >= 1");
  for (double x : values) {
    if (!std::isfinite(x)) throw ConfigError("sweep.values", "values must be finite");
    if (axis == SweepAxis::lambda && !(x > 0.0)) throw ConfigError("sweep.values", "lambda values must be positive");
    if (axis == SweepAxis::amplitude && !(x >= 0.0))
      throw ConfigError("sweep.values", "amplitudes must be nonnegative");
    if (axis == SweepAxis::k && x != std::floor(x)) throw ConfigError("sweep.values", "k values must be integers");
  }
  base.validate();
}

SweepConfig parse_sweep_config(const ConfigDocument& doc) {
  ConfigDocument base_doc;
  ConfigDocument sweep_doc;
  for (const auto& [k, v] : doc.entries()) (k.rfind("sweep.", 0) == 0 ? sweep_doc : base_doc).set(k, v);

  SweepConfig s;
  s.base = parse_run_config(base_doc);
  ConfigReader in(sweep_doc);
  const std::string axis = in.text("sweep.axis", "");
  if (axis == "lambda") s.axis = SweepAxis::lambda;
  else if (axis == "sigma1") s.axis = SweepAxis::sigma1;
  else if (axis == "amplitude") s.axis = SweepAxis::amplitude;
  else if (axis == "k") s.axis = SweepAxis::k;
  else throw ConfigError("sweep.axis", "expected lambda, sigma1, amplitude or k, got '" + axis + "'");
  s.values = in.numbers("sweep.values");
  s.parallelism = in.integer("sweep.parallelism", s.parallelism);
  in.finish();
  s.validate();
  return s;
}

ConfigDocument to_document(const SweepConfig& s) {
  ConfigDocument d = to_document(s.base);
  d.set("sweep.axis", to_string(s.axis));
  std::string list;
  for (double x : s.values) list += (list.empty() ? "" : ", ") + format_number(x);
  d.set("sweep.values", list);
  d.set("sweep.parallelism", std::to_string(s.parallelism));
  return d;
}

}  // namespace pdh
