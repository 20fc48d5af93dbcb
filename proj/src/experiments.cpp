#include "pdh/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "pdh/spectral.hpp"

namespace pdh {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DyadicDecomposition decomposition_for(const GridSpec& g) { return DyadicDecomposition::build(CutoffProfile(), g); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string prepare_dir(const std::string& dir) {
  const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(p);
  return p.string();
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_table(const RunConfig& cfg, const Trajectory& traj, const DyadicDecomposition& d) {
  const auto columns = cfg.norms.empty() ? default_norms(cfg) : cfg.norms;
  std::vector<std::vector<double>> values;
  std::string out = "t";
  for (const auto& c : columns) {
    out += "," + c.label();
    values.push_back(column_values(traj, d, c));
  }
  out += "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_number(traj.times()[i]);
    for (const auto& col : values) out += "," + format_number(col[i]);
    out += "\n";
  }
  return out;
}

std::string plot_script(const RunConfig& cfg, std::size_t columns) {
  std::string s;
  s += "# gnuplot script: norm columns of " + cfg.name + ".csv against time\n";
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead outside\n";
  s += "set logscale xy\n";
  s += "set xlabel 't'\n";
  s += "set terminal pngcairo size 1000,700\n";
  s += "set output '" + cfg.name + ".png'\n";
  s += "plot for [i=2:" + std::to_string(columns + 1) + "] '" + cfg.name + ".csv' using 1:i with lines\n";
  return s;
}

LyapunovSpec lyapunov_spec_for(const RunConfig& cfg, double eta) {
  LyapunovSpec spec;
  spec.eta = eta;
  spec.J0 = cfg.J0;
  spec.lambda = cfg.lambda;
  if (cfg.model == ModelKind::euler) {
    spec.variant = LyapunovVariant::euler;
    spec.pressure = PressureLaw::gamma_law(cfg.gamma);
  }
  return spec;
}

GeneralConfig general_config(const RunConfig& c) {
  GeneralConfig g;
  g.alpha = c.alpha;
  g.beta = c.beta;
  g.lambda = c.lambda;
  g.kappa = c.kappa;
  g.q = c.q;
  g.V1 = [a = c.v1](double v) { return a * v; };
  g.V2 = [a = c.v2](double v) { return a * v; };
  g.W1 = [a = c.w1u, b = c.w1v](double u, double v) { return a * u + b * v; };
  g.W2 = [a = c.w2u, b = c.w2v](double u, double v) { return a * u + b * v; };
  return g;
}

Json lyapunov_summary(const RunConfig& cfg, const Trajectory& traj, const DyadicDecomposition& d) {
  LyapunovSpec spec = lyapunov_spec_for(cfg, cfg.eta);
  FunctionalSeries series;
  if (cfg.model == ModelKind::general) {
    // the general functional is written in normalized variables
    const auto n = normalize_general(general_config(cfg));
    Trajectory normalized(n.scaling.to_normalized(traj.grid()));
    for (const auto& s : traj.states()) normalized.append(n.scaling.to_normalized(s));
    spec.variant = LyapunovVariant::general;
    spec.lambda = 1.0;
    spec.general = n.config;
    series = lyapunov_series(normalized, decomposition_for(normalized.grid()), spec);
  } else {
    series = lyapunov_series(traj, d, spec);
  }
  double worst = 0.0;
  double worst_time = 0.0;
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    const double prev = series.values[i - 1];
    const double inc = prev > 0.0 ? (series.values[i] - prev) / prev : (series.values[i] > 0.0 ? kInf : 0.0);
    if (inc > worst) {
      worst = inc;
      worst_time = series.times[i];
    }
  }
  Json j;
  j["variant"] = cfg.model == ModelKind::general ? "general" : cfg.model == ModelKind::euler ? "euler" : "toy";
  j["eta"] = cfg.eta;
  j["J0"] = cfg.J0;
  j["initial"] = series.values.front();
  j["final"] = series.values.back();
  j["max_relative_increase"] = number_or_null(worst);
  j["at_time"] = worst_time;
  j["tolerance"] = cfg.lyapunov_tolerance;
  j["monotone"] = worst <= cfg.lyapunov_tolerance;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

SystemState make_run_data(const RunConfig& cfg) {
  const GridSpec g = cfg.grid();
  SystemState s = make_initial_data(cfg.envelope, cfg.amplitude, cfg.seed, g);
  switch (cfg.velocity) {
    case VelocityProfile::random: break;
    case VelocityProfile::zero: s.second = Field::zero(g); break;
    case VelocityProfile::darcy: s.second = (-1.0 / cfg.lambda) * derivative(s.first); break;
  }
  return s;
}

std::unique_ptr<Model> make_model(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::toy: return std::make_unique<ToyModel>(ToyConfig{cfg.lambda, cfg.nonlinear});
    case ModelKind::euler: return std::make_unique<EulerModel>(EulerConfig{cfg.lambda, PressureLaw::gamma_law(cfg.gamma)});
    case ModelKind::general: return std::make_unique<GeneralModel>(general_config(cfg));
  }
  throw ConfigError("model.kind", "unknown model");
}

Trajectory simulate_run(const RunConfig& cfg) {
  cfg.validate();
  return simulate(make_run_data(cfg), *make_model(cfg), cfg.simulation());
}

std::vector<NormColumn> default_norms(const RunConfig& cfg) {
  const int J = j_threshold(cfg.lambda, cfg.k);
  return {
      {{cfg.sigma, 2.0, 1.0}, Side::low, J, Component::both},
      {{-cfg.sigma1, 2.0, kInf}, Side::low, J, Component::second},
      {{1.5, 2.0, 1.0}, Side::high, J, Component::both},
      {{1.0 / cfg.p, cfg.p, 1.0}, Side::full, J, Component::second},
  };
}

std::vector<double> column_values(const Trajectory& traj, const DyadicDecomposition& d, const NormColumn& c) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.states()) {
    switch (c.component) {
      case Component::both: out.push_back(besov_norm(s, d, c.spec, c.side, c.J)); break;
      case Component::first: out.push_back(d.besov_norm(s.first, c.spec, c.side, c.J)); break;
      case Component::second: out.push_back(d.besov_norm(s.second, c.spec, c.side, c.J)); break;
    }
  }
  return out;
}

Json summarize(const RunConfig& cfg, const Trajectory& traj, const DyadicDecomposition& d) {
  Json s;
  const int J = j_threshold(cfg.lambda, cfg.k);

  const auto terms = X_p_lambda_terms(traj, d, cfg.p, cfg.lambda, cfg.k);
  const double data = hybrid_data_norm(traj.front(), d, cfg.p, cfg.lambda, cfg.k).combined;
  double X_sup = 0.0;
  for (const auto& t : terms) X_sup = std::max(X_sup, t.total());
  Json x;
  x["p"] = cfg.p;
  x["lambda"] = cfg.lambda;
  x["k"] = cfg.k;
  x["J"] = J;
  x["data"] = data;
  x["final"] = terms.back().total();
  x["sup"] = X_sup;
  x["ratio"] = data > 0.0 ? X_sup / data : 0.0;
  s["X"] = x;

  Json lyap = lyapunov_summary(cfg, traj, d);
  bool pass = lyap["monotone"].get<bool>();
  s["lyapunov"] = lyap;

  const auto dn = decay_data_norms(traj.front(), d, cfg.sigma1, cfg.lambda, cfg.k);
  const auto ex = predicted_decay(cfg.sigma1, cfg.sigma, cfg.lambda, dn);
  const double t_end = std::min(cfg.window_end > 0.0 ? cfg.window_end : traj.times().back(), torus_window(traj.grid()));
  Json decay;
  decay["sigma1"] = cfg.sigma1;
  decay["sigma"] = cfg.sigma;
  decay["kappa0_predicted"] = ex.kappa0;
  decay["abscissa"] = "log(1 + lambda t)";
  decay["window"] = {cfg.window_start, t_end};
  Json fits = Json::array();
  struct Target {
    NormColumn column;
    double predicted;
    bool upper_bound;
  };
  const Target targets[] = {
      {{{cfg.sigma, 2.0, 1.0}, Side::low, J, Component::both}, -ex.alpha, false},
      {{{-cfg.sigma1, 2.0, kInf}, Side::low, J, Component::second}, -ex.alpha1, false},
      {{{1.5, 2.0, 1.0}, Side::high, J, Component::both}, -ex.alpha2, true},
  };
  for (const auto& tg : targets) {
    Json f;
    f["norm"] = tg.column.label();
    f["predicted"] = tg.predicted;
    FunctionalSeries series{traj.times(), column_values(traj, d, tg.column), tg.column.label()};
    try {
      const auto fit = decay_fit(series, {cfg.window_start, t_end}, 1.0, cfg.lambda);
      f["fitted"] = fit.slope;
      f["r_squared"] = fit.r_squared;
      f["samples"] = fit.samples;
      bool ok;
      if (tg.upper_bound) {
        f["rule"] = "fitted <= predicted + " + format_number(cfg.high_slope_margin);
        ok = fit.slope <= tg.predicted + cfg.high_slope_margin;
      } else {
        f["rule"] = "|fitted - predicted| <= " + format_number(cfg.decay_tolerance);
        ok = std::abs(fit.slope - tg.predicted) <= cfg.decay_tolerance;
      }
      f["pass"] = ok;
      pass = pass && ok;
    } catch (const FitError& e) {
      f["fitted"] = nullptr;
      f["skipped"] = e.what();
      f["pass"] = true;
    }
    fits.push_back(f);
  }
  decay["fits"] = fits;
  s["decay"] = decay;
  s["pass"] = pass;
  return s;
}

RunResult run(const RunConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const std::string dir = prepare_dir(out_dir);
  const GridSpec g = cfg.grid();
  const auto d = decomposition_for(g);

  RunResult r{Trajectory(g), Json::object(), false, "", "", "", ""};
  r.trajectory.append(make_run_data(cfg));
  std::exception_ptr failure;
  std::string failure_text;
  try {
    advance(r.trajectory, *make_model(cfg), cfg.simulation());
  } catch (const BlowupDetected& e) {
    failure = std::current_exception();
    failure_text = e.what();
  } catch (const DomainError& e) {
    failure = std::current_exception();
    failure_text = e.what();
  }

  const auto base = (fs::path(dir) / cfg.name).string();
  r.csv_path = base + ".csv";
  r.summary_path = base + ".json";
  r.plot_path = base + ".gp";
  const auto columns = cfg.norms.empty() ? default_norms(cfg) : cfg.norms;
  write_text(r.csv_path, csv_table(cfg, r.trajectory, d));
  write_text(r.plot_path, plot_script(cfg, columns.size()));
  if (cfg.write_trajectory) {
    r.trajectory_path = base + ".traj";
    write_trajectory(r.trajectory, r.trajectory_path);
  }

  Json s;
  s["name"] = cfg.name;
  Json config = Json::object();
  const ConfigDocument doc = to_document(cfg);
  for (const auto& [k, v] : doc.entries()) config[k] = v;
  s["config"] = config;
  s["grid"] = {{"points", g.points()}, {"length", g.length()}, {"t_spec", torus_window(g)}};
  s["snapshots"] = r.trajectory.size();
  s["final_time"] = r.trajectory.times().back();
  if (failure) {
    s["status"] = "failed";
    s["error"] = failure_text;
    s["pass"] = false;
  } else {
    s["status"] = "ok";
    const Json details = summarize(cfg, r.trajectory, d);
    for (const auto& [k, v] : details.items()) s[k] = v;
  }
  r.summary = s;
  r.pass = s["pass"].get<bool>();
  write_text(r.summary_path, s.dump(2) + "\n");
  if (failure) std::rethrow_exception(failure);
  return r;
}

// ---------------------------------------------------------------------------

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw AlignmentError("regression needs matching samples");
  if (x.size() < 2) throw FitError("regression needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("regression abscissae coincide");
  return sxy / sxx;
}

std::map<std::string, double> sweep_outputs(const RunConfig& cfg, const Trajectory& traj,
                                            const DyadicDecomposition& d) {
  const double p = cfg.p;
  std::vector<double> v2;
  double drift = 0.0;
  const Field& u0 = traj.front().first;
  for (const auto& s : traj.states()) {
    const double b = d.besov_norm(s.second, {1.0 / p, p, 1.0});
    v2.push_back(b * b);
    drift = std::max(drift, d.besov_norm(s.first - u0, {0.0, p, 1.0}));
  }
  std::map<std::string, double> out;
  out["v_L2"] = std::sqrt(running_trapezoid(traj.times(), v2).back());
  out["u_drift"] = drift;
  const double X = X_p_lambda(traj, d, p, cfg.lambda, cfg.k);
  const double data = hybrid_data_norm(traj.front(), d, p, cfg.lambda, cfg.k).combined;
  out["X"] = X;
  out["X_ratio"] = data > 0.0 ? X / data : 0.0;
  const int J = j_threshold(cfg.lambda, cfg.k);
  const auto neg = column_values(traj, d, {{-cfg.sigma1, 2.0, kInf}, Side::low, J, Component::both});
  out["low_neg_ratio"] = neg.front() > 0.0 ? *std::max_element(neg.begin(), neg.end()) / neg.front() : 0.0;
  return out;
}

SweepTable sweep(const SweepConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const std::string dir = prepare_dir(out_dir);
  SweepTable table;
  table.axis = cfg.axis;
  table.columns = {"v_L2", "u_drift", "X", "X_ratio", "low_neg_ratio"};
  table.rows.resize(cfg.values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cfg.values.size(); i = next++) {
      SweepRow& row = table.rows[i];
      row.value = cfg.values[i];
      try {
        const RunConfig c = cfg.cell(i);
        const RunResult r = run(c, dir);
        row.outputs = sweep_outputs(c, r.trajectory, decomposition_for(r.trajectory.grid()));
        row.outputs["summary_pass"] = r.pass ? 1.0 : 0.0;
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(cfg.parallelism, cfg.values.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& col : table.columns) {
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
      if (!row.ok) continue;
      const double v = row.outputs.at(col);
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      if (cfg.axis != SweepAxis::k && !(row.value > 0.0)) continue;
      x.push_back(cfg.axis == SweepAxis::k ? row.value * std::log(2.0) : std::log(row.value));
      y.push_back(std::log(v));
    }
    try {
      table.slopes[col] = regression_slope(x, y);
    } catch (const FitError&) {
      table.slopes[col] = kNaN;
    }
  }

  const std::string axis = to_string(cfg.axis);
  std::string csv = axis + ",ok";
  for (const auto& c : table.columns) csv += "," + c;
  csv += ",error\n";
  for (const auto& row : table.rows) {
    csv += format_number(row.value) + "," + (row.ok ? "1" : "0");
    for (const auto& c : table.columns) csv += "," + (row.ok ? format_number(row.outputs.at(c)) : std::string());
    std::string err = row.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    csv += ",\"" + err + "\"\n";
  }
  csv += "slope,";
  for (const auto& c : table.columns) csv += "," + format_number(table.slopes[c]);
  csv += ",\n";

  Json j;
  j["name"] = cfg.base.name;
  j["axis"] = axis;
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    r[axis] = row.value;
    r["ok"] = row.ok;
    if (row.ok)
      for (const auto& [k, v] : row.outputs) r[k] = number_or_null(v);
    else
      r["error"] = row.error;
    rows.push_back(r);
  }
  j["rows"] = rows;
  Json slopes = Json::object();
  for (const auto& [k, v] : table.slopes) slopes["d log " + k + " / d log " + axis] = number_or_null(v);
  j["slopes"] = slopes;

  const auto base = (fs::path(dir) / (cfg.base.name + "_sweep")).string();
  write_text(base + ".csv", csv);
  write_text(base + ".json", j.dump(2) + "\n");
  return table;
}

// ---------------------------------------------------------------------------

SmallnessSearch find_smallness(const RunConfig& base, double growth, int iterations) {
  if (!(base.amplitude > 0.0)) throw RangeError("smallness search starts from a positive amplitude");
  if (!(growth > 1.0)) throw RangeError("growth factor must exceed 1");
  if (iterations < 1) throw RangeError("bisection needs at least one iteration");
  base.validate();
  SmallnessSearch out;
  out.growth = growth;

  auto ratio_at = [&](double a) {
    RunConfig c = base;
    c.amplitude = a;
    double r = kInf;
    try {
      const Trajectory traj = simulate_run(c);
      const auto d = decomposition_for(traj.grid());
      const double data = hybrid_data_norm(traj.front(), d, c.p, c.lambda, c.k).combined;
      const double X = X_p_lambda(traj, d, c.p, c.lambda, c.k);
      r = data > 0.0 && std::isfinite(X) ? X / data : kInf;
    } catch (const BlowupDetected&) {
    } catch (const DomainError&) {
    }
    out.probes.emplace_back(a, r);
    return r;
  };

  out.reference_ratio = ratio_at(base.amplitude * 1e-4);
  if (!std::isfinite(out.reference_ratio)) throw FitError("linear-regime run failed");
  auto admissible = [&](double a) { return ratio_at(a) <= growth * out.reference_ratio; };

  double lo, hi;
  if (admissible(base.amplitude)) {
    lo = base.amplitude;
    hi = 2.0 * lo;
    for (int n = 0; admissible(hi); ++n) {
      if (n > 30) throw FitError("no inadmissible amplitude found below 2^30 times the start");
      lo = hi;
      hi *= 2.0;
    }
  } else {
    hi = base.amplitude;
    lo = 0.5 * hi;
    for (int n = 0; !admissible(lo); ++n) {
      if (n > 30) throw FitError("no admissible amplitude found above 2^-30 times the start");
      hi = lo;
      lo *= 0.5;
    }
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = std::sqrt(lo * hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  out.c0 = lo;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'D', 'H', 'T', 'R', 'A', 'J', '1'};

template <typename T>
void put(std::ofstream& out, const T& x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T take(std::ifstream& in, const std::string& path) {
  T x;
  in.read(reinterpret_cast<char*>(&x), sizeof(T));
  if (!in) throw FormatError(path + ": truncated trajectory file");
  return x;
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(traj.grid().points()));
  put<double>(out, traj.grid().length());
  put<std::uint64_t>(out, traj.size());
  const auto bytes = static_cast<std::streamsize>(traj.grid().spectrum_size() * sizeof(std::complex<double>));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    put<double>(out, traj.times()[i]);
    out.write(reinterpret_cast<const char*>(traj.states()[i].first.coefficients().data()), bytes);
    out.write(reinterpret_cast<const char*>(traj.states()[i].second.coefficients().data()), bytes);
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open trajectory file " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError(path + ": not a PDHTRAJ1 file");
  const auto points = take<std::uint64_t>(in, path);
  const double length = take<double>(in, path);
  const auto count = take<std::uint64_t>(in, path);
  if (points > (std::uint64_t(1) << 26)) throw FormatError(path + ": implausible grid size");
  try {
    const GridSpec g(static_cast<Index>(points), length);
    Trajectory traj(g);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double t = take<double>(in, path);
      ComplexArray cu(g.spectrum_size()), cv(g.spectrum_size());
      const auto bytes = static_cast<std::streamsize>(g.spectrum_size() * sizeof(std::complex<double>));
      in.read(reinterpret_cast<char*>(cu.data()), bytes);
      in.read(reinterpret_cast<char*>(cv.data()), bytes);
      if (!in) throw FormatError(path + ": truncated trajectory file");
      traj.append(SystemState(Field::from_coefficients(g, std::move(cu)), Field::from_coefficients(g, std::move(cv)), t));
    }
    return traj;
  } catch (const GridError& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const RangeError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string output_directory(const std::string& fallback) {
  const char* env = std::getenv("PDH_OUTPUT_DIR");
  return env && *env ? std::string(env) : fallback;
}

}  // namespace pdh
