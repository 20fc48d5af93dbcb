#include "pdh/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "pdh/inequality_lab.hpp"

namespace pdh {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

/// Distance to the limit in units of the limit; negative when the check fails.
double margin(const Verdict& v) {
  const auto scale = [](double x) { return std::max(std::abs(x), 1e-300); };
  if (v.relation == "<=" || v.relation == "<") return (v.limit - v.value) / scale(v.limit);
  if (v.relation == ">=") return (v.value - v.limit) / scale(v.limit);
  if (v.relation == "in") {
    const double half = 0.5 * (v.limit_hi - v.limit);
    return std::min(v.value - v.limit, v.limit_hi - v.value) / scale(half);
  }
  return v.pass ? kInf : -kInf;
}

CriterionReport evaluate(int id, std::string title, const std::function<void(CriterionReport&)>& body) {
  CriterionReport r;
  r.id = id;
  r.title = std::move(title);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

DyadicDecomposition decomposition_for(const GridSpec& g) { return DyadicDecomposition::build(CutoffProfile(), g); }

double l2_norm(const SystemState& s) {
  return std::sqrt(s.grid().length() * (s.first.power() + s.second.power()));
}

double max_relative_increase(const FunctionalSeries& s) {
  double worst = 0.0;
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    const double prev = s.values[i - 1];
    if (prev > 0.0) worst = std::max(worst, (s.values[i] - prev) / prev);
    else if (s.values[i] > 0.0) worst = kInf;
  }
  return worst;
}

RunConfig with_amplitude(RunConfig c, double a, double horizon) {
  c.amplitude = a;
  c.horizon = horizon;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

Verdict Verdict::at_most(std::string name, double value, double limit, std::string detail) {
  return {std::move(name), value, "<=", limit, 0.0, value <= limit, std::move(detail)};
}

Verdict Verdict::below(std::string name, double value, double limit, std::string detail) {
  return {std::move(name), value, "<", limit, 0.0, value < limit, std::move(detail)};
}

Verdict Verdict::at_least(std::string name, double value, double limit, std::string detail) {
  return {std::move(name), value, ">=", limit, 0.0, value >= limit, std::move(detail)};
}

Verdict Verdict::within(std::string name, double value, double lo, double hi, std::string detail) {
  return {std::move(name), value, "in", lo, hi, value >= lo && value <= hi, std::move(detail)};
}

Verdict Verdict::holds(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? 1.0 : 0.0, "true", 1.0, 0.0, ok, std::move(detail)};
}

bool CriterionReport::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Verdict& v) { return v.pass; });
}

std::string CriterionReport::line() const {
  std::string s = std::string(pass() ? "[PASS] " : "[FAIL] ") + std::to_string(id) + " " + title + " (" +
                  std::to_string(checks.size()) + " checks, " + fmt(seconds) + " s)";
  if (!error.empty()) return s + ": error: " + error;
  if (checks.empty()) return s + ": nothing measured";
  const auto worst = std::min_element(checks.begin(), checks.end(), [](const Verdict& a, const Verdict& b) {
    if (a.pass != b.pass) return !a.pass;
    return margin(a) < margin(b);
  });
  s += ": " + std::string(worst->pass ? "tightest " : "failed ") + worst->name;
  if (worst->relation == "true") return s;
  s += " = " + fmt(worst->value) + " ";
  if (worst->relation == "in") return s + "in [" + fmt(worst->limit) + ", " + fmt(worst->limit_hi) + "]";
  return s + worst->relation + " " + fmt(worst->limit);
}

bool SuiteReport::pass() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionReport& c) { return c.pass(); });
}

Json SuiteReport::to_json() const {
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(std::isnan(x) ? "nan" : x > 0 ? "inf" : "-inf"); };
  Json j;
  j["suite"] = suite;
  j["pass"] = pass();
  Json list = Json::array();
  for (const auto& c : criteria) {
    Json cj;
    cj["id"] = c.id;
    cj["title"] = c.title;
    cj["pass"] = c.pass();
    cj["seconds"] = c.seconds;
    if (!c.error.empty()) cj["error"] = c.error;
    Json checks = Json::array();
    for (const auto& v : c.checks) {
      Json vj;
      vj["name"] = v.name;
      vj["value"] = num(v.value);
      vj["relation"] = v.relation;
      if (v.relation == "in") vj["limit"] = {num(v.limit), num(v.limit_hi)};
      else if (v.relation != "true") vj["limit"] = num(v.limit);
      vj["pass"] = v.pass;
      if (!v.detail.empty()) vj["detail"] = v.detail;
      checks.push_back(vj);
    }
    cj["checks"] = checks;
    list.push_back(cj);
  }
  j["criteria"] = list;
  return j;
}

void write_verdict(const SuiteReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << report.to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------------

RunConfig AcceptanceSetup::base() const {
  RunConfig c;
  c.name = "acceptance";
  c.model = ModelKind::toy;
  c.lambda = 1.0;
  c.log2_points = log2_points;
  c.log2_periods = log2_periods;
  c.envelope = Envelope{-0.5, 2.0, 0, 0.0};
  c.velocity = VelocityProfile::darcy;
  c.amplitude = 1.0;
  c.seed = 1;
  c.horizon = 40.0;
  c.snapshot = 0.1;
  c.p = 2.0;
  c.k = -2;
  c.J0 = -2;
  c.sigma1 = 0.5;
  c.sigma = 0.5;
  return c;
}

AcceptanceContext::AcceptanceContext(AcceptanceSetup setup) : setup_(std::move(setup)) {
  if (!(setup_.safety > 0.0 && setup_.safety <= 1.0)) throw RangeError("safety fraction must lie in (0, 1]");
}

const SmallnessSearch& AcceptanceContext::smallness() {
  if (!smallness_) smallness_ = find_smallness(setup_.base(), 1.5, 8);
  return *smallness_;
}

double AcceptanceContext::small_amplitude() { return setup_.safety * smallness().c0; }

const Trajectory& AcceptanceContext::trajectory(const RunConfig& cfg) {
  const std::string key = to_document(cfg).serialize();
  auto it = runs_.find(key);
  if (it == runs_.end()) it = runs_.emplace(key, std::make_unique<Trajectory>(simulate_run(cfg))).first;
  return *it->second;
}

// ---------------------------------------------------------------------------

CriterionReport criterion_partition_of_unity() {
  return evaluate(1, "partition of unity", [](CriterionReport& r) {
    for (auto [points, periods] : {std::pair{8, 3}, std::pair{13, 7}, std::pair{14, 7}}) {
      const GridSpec g = GridSpec::dyadic(points, periods);
      const auto d = decomposition_for(g);
      const std::string tag = "N=2^" + std::to_string(points) + " L=2pi*2^" + std::to_string(periods);

      const auto sum = d.multiplier_sum();
      double dev = 0.0;
      for (Index m = 1; m < sum.size(); ++m) dev = std::max(dev, std::abs(1.0 - sum(m)));
      r.checks.push_back(Verdict::below("max |sum phi - 1| " + tag, dev, 1e-10));

      Envelope flat{0.0, 0.0, 0, 0.0};
      const Field f = make_initial_data(flat, 1.0, 3, g).first;
      Field rebuilt = Field::zero(g);
      for (int j = d.j_min(); j <= d.j_max(); ++j) rebuilt += d.block(f, j);
      const double err = (rebuilt - f).samples().abs().maxCoeff() / f.samples().abs().maxCoeff();
      r.checks.push_back(Verdict::below("reconstruction error " + tag, err, 1e-10));
    }
  });
}

CriterionReport criterion_linear_spectrum() {
  return evaluate(2, "linear spectrum", [](CriterionReport& r) {
    const double lambda = 1.0;
    for (double xi : {0.01, 0.05, 0.1}) {
      const auto [slow, fast] = linear_spectrum(xi, lambda);
      const long double disc = std::sqrt((long double)lambda * lambda - 4.0L * xi * xi);
      const double slow_o = static_cast<double>(2.0L * xi * xi / (lambda + disc));
      const double fast_o = static_cast<double>((lambda + disc) / 2.0L);
      const std::string tag = " xi=" + fmt(xi);
      r.checks.push_back(Verdict::below("|slow - oracle| / oracle" + tag, std::abs(slow - slow_o) / slow_o, 1e-10));
      r.checks.push_back(Verdict::below("|fast - oracle| / oracle" + tag, std::abs(fast - fast_o) / fast_o, 1e-10));
      r.checks.push_back(Verdict::below("|slow / xi^2 - 1|" + tag, std::abs(slow.real() / (xi * xi) - 1.0), 0.05));
      r.checks.push_back(
          Verdict::below("|fast / (1 - xi^2) - 1|" + tag, std::abs(fast.real() / (1.0 - xi * xi) - 1.0), 0.05));
    }
    const auto [z0, z1] = linear_spectrum(0.0, lambda);
    r.checks.push_back(Verdict::holds("xi=0 gives {0, lambda}", z0 == 0.0 && z1 == lambda));
  });
}

CriterionReport criterion_rescaling(AcceptanceContext& ctx) {
  return evaluate(3, "rescaling identity", [&](CriterionReport& r) {
    RunConfig c = ctx.setup().base();
    c.log2_points = std::min(c.log2_points, 12);
    const GridSpec g = c.grid();
    const SystemState data = make_run_data(c);
    const double dt = 0.05;
    const Trajectory tm1 = simulate(data, ToyModel({1.0, true}), {20.0, 0.2, kDefaultCfl, dt});
    const Trajectory mapped = rescale_solution(tm1, 2.0);
    const Trajectory tm2 =
        simulate(rescale_state(data, 2.0, g.scaled(0.5)), ToyModel({2.0, true}), {10.0, 0.1, kDefaultCfl, dt / 2});
    if (mapped.size() != tm2.size()) throw AlignmentError("rescaled and direct runs hold different snapshot counts");
    double worst = 0.0;
    for (std::size_t i = 0; i < tm2.size(); ++i) {
      const SystemState& a = tm2.states()[i];
      const SystemState& b = mapped.states()[i];
      const SystemState diff(a.first - b.first, a.second - b.second, a.time);
      worst = std::max(worst, l2_norm(diff) / l2_norm(a));
    }
    r.checks.push_back(Verdict::below("max_t relative L2 difference over horizon 10", worst, 1e-5,
                                      "N=" + std::to_string(g.points()) + ", dt1=" + fmt(dt) + ", dt2=" + fmt(dt / 2)));
  });
}

CriterionReport criterion_lyapunov(AcceptanceContext& ctx, std::optional<double> amplitude) {
  return evaluate(4, "Lyapunov monotonicity", [&](CriterionReport& r) {
    const double a = amplitude ? *amplitude : ctx.small_amplitude();
    const RunConfig c = with_amplitude(ctx.setup().base(), a, 40.0);
    const Trajectory& traj = ctx.trajectory(c);
    const auto d = decomposition_for(traj.grid());
    std::string detail = "amplitude " + fmt(a);
    if (!amplitude) detail += " = " + fmt(ctx.setup().safety) + " c0, c0 = " + fmt(ctx.smallness().c0);
    for (double eta : {0.05, 0.1, 0.2}) {
      LyapunovSpec spec;
      spec.variant = LyapunovVariant::toy;
      spec.lambda = c.lambda;
      spec.eta = eta;
      spec.J0 = c.J0;
      const auto series = lyapunov_series(traj, d, spec);
      r.checks.push_back(Verdict::at_most("max relative step increase eta=" + fmt(eta),
                                          max_relative_increase(series), 1e-6, detail));
    }
  });
}

CriterionReport criterion_decay(AcceptanceContext& ctx) {
  return evaluate(5, "decay exponents", [&](CriterionReport& r) {
    const RunConfig c = with_amplitude(ctx.setup().base(), ctx.small_amplitude(), 80.0);
    const Trajectory traj = simulate_run(c);
    const auto d = decomposition_for(traj.grid());
    const int J = j_threshold(c.lambda, c.k);
    const double t_end = std::min(c.horizon, torus_window(traj.grid()));
    const auto ex = predicted_decay(c.sigma1, c.sigma, c.lambda, decay_data_norms(traj.front(), d, c.sigma1, c.lambda, c.k));
    auto fit = [&](const NormColumn& col) {
      return decay_fit({traj.times(), column_values(traj, d, col), col.label()}, {2.0, t_end}, 1.0, c.lambda);
    };
    const auto low = fit({{c.sigma, 2.0, 1.0}, Side::low, J, Component::both});
    const auto v = fit({{-c.sigma1, 2.0, kInf}, Side::low, J, Component::second});
    const auto high = fit({{1.5, 2.0, 1.0}, Side::high, J, Component::both});
    const std::string window = "window [2, " + fmt(t_end) + "], amplitude " + fmt(c.amplitude);
    r.checks.push_back(Verdict::within("low (u,v) B^{1/2}_{2,1} slope", low.slope, -ex.alpha - 0.15, -ex.alpha + 0.15,
                                       window + ", r2 " + fmt(low.r_squared)));
    r.checks.push_back(Verdict::within("low v B^{-1/2}_{2,inf} slope", v.slope, -ex.alpha1 - 0.15, -ex.alpha1 + 0.15,
                                       window + ", r2 " + fmt(v.r_squared)));
    r.checks.push_back(Verdict::at_most("high (u,v) B^{3/2}_{2,1} slope", high.slope, -0.8,
                                        window + ", alpha2 = " + fmt(ex.alpha2)));
  });
}

CriterionReport criterion_negative_besov(AcceptanceContext& ctx) {
  return evaluate(6, "negative Besov propagation", [&](CriterionReport& r) {
    const double a = ctx.small_amplitude();
    std::vector<double> ratios;
    for (double amp : {a, 0.5 * a}) {
      const RunConfig c = with_amplitude(ctx.setup().base(), amp, 40.0);
      const Trajectory& traj = ctx.trajectory(c);
      const auto d = decomposition_for(traj.grid());
      const auto vals =
          column_values(traj, d, {{-c.sigma1, 2.0, kInf}, Side::low, j_threshold(c.lambda, c.k), Component::both});
      const double ratio = *std::max_element(vals.begin(), vals.end()) / vals.front();
      ratios.push_back(ratio);
      r.checks.push_back(Verdict::at_most("sup_t ||(u,v)||^l_{B^{-1/2}_{2,inf}} / data, amplitude " + fmt(amp), ratio, 3.0));
    }
    r.checks.push_back(Verdict::below("relative change under amplitude halving",
                                      std::abs(ratios[0] - ratios[1]) / ratios[1], 0.1));
  });
}

CriterionReport criterion_relaxation(AcceptanceContext& ctx) {
  return evaluate(7, "relaxation limit", [&](CriterionReport& r) {
    SweepConfig s;
    s.base = ctx.setup().base();
    s.base.name = "relaxation";
    s.base.velocity = VelocityProfile::zero;
    s.base.envelope = Envelope{0.0, 1.5, 1, 0.0, 1.0, 8.0};
    s.base.amplitude = 0.05;
    s.base.horizon = 40.0;
    s.axis = SweepAxis::lambda;
    s.values = {1.0, 4.0, 16.0, 64.0};
    const SweepTable t = sweep(s, ctx.setup().out_dir);
    bool all_ok = true;
    std::string errors;
    for (const auto& row : t.rows) {
      all_ok = all_ok && row.ok;
      if (!row.ok) errors += "lambda=" + fmt(row.value) + ": " + row.error + "; ";
    }
    r.checks.push_back(Verdict::holds("every lambda cell finished", all_ok, errors));
    if (!all_ok) return;
    r.checks.push_back(Verdict::within("slope of log ||v||_{L2_t(B^{1/p}_{p,1})} vs log lambda", t.slopes.at("v_L2"),
                                       -0.65, -0.4));
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      const double prev = t.rows[i - 1].outputs.at("u_drift");
      const double cur = t.rows[i].outputs.at("u_drift");
      r.checks.push_back(Verdict::below("sup_t ||u - u0||_{B^0_{p,1}} ratio lambda=" + fmt(t.rows[i].value) + " / " +
                                            fmt(t.rows[i - 1].value),
                                        cur / prev, 1.0));
    }
  });
}

CriterionReport criterion_boundedness(AcceptanceContext& ctx) {
  return evaluate(8, "X_{p,lambda} boundedness", [&](CriterionReport& r) {
    const double a = ctx.small_amplitude();
    for (double p : {2.0, 4.0}) {
      std::vector<double> ratios;
      for (double amp : {a, 0.5 * a}) {
        const RunConfig c = with_amplitude(ctx.setup().base(), amp, 40.0);
        const Trajectory& traj = ctx.trajectory(c);
        const auto d = decomposition_for(traj.grid());
        const auto terms = X_p_lambda_terms(traj, d, p, c.lambda, c.k);
        double sup = 0.0;
        for (const auto& t : terms) sup = std::max(sup, t.total());
        const double ratio = sup / hybrid_data_norm(traj.front(), d, p, c.lambda, c.k).combined;
        ratios.push_back(ratio);
        r.checks.push_back(Verdict::at_most("sup_t X / data norm, p=" + fmt(p) + ", amplitude " + fmt(amp), ratio, 10.0));
      }
      r.checks.push_back(Verdict::below("relative change under amplitude halving, p=" + fmt(p),
                                        std::abs(ratios[0] - ratios[1]) / ratios[1], 0.1));
    }
  });
}

CriterionReport criterion_inequality_lab() {
  return evaluate(9, "inequality lab", [](CriterionReport& r) {
    const GridSpec g(1024, 80.0 * M_PI);
    const int levels = 5;
    const std::uint64_t seeds[] = {1, 2, 3};
    std::map<int, DyadicDecomposition> cache;
    auto dec = [&](int lev) -> const DyadicDecomposition& {
      auto it = cache.find(lev);
      if (it == cache.end()) it = cache.emplace(lev, decomposition_for(dilate(Field::zero(g), lev).grid())).first;
      return it->second;
    };
    auto record = [&](const std::string& name, InputFamily family,
                      const std::function<std::vector<RatioReport>(int)>& evaluate_level) {
      const auto study = study_dilation(evaluate_level, levels);
      std::string constants;
      for (double c : study.constants) constants += (constants.empty() ? "" : ", ") + fmt(c);
      r.checks.push_back(Verdict::below(name + " [" + to_string(family) + "] dilation spread", study.spread, 0.2,
                                        "constants " + constants));
    };

    for (auto family : {InputFamily::random_band, InputFamily::packet, InputFamily::multiscale}) {
      record("Bernstein", family, [&](int lev) {
        std::vector<RatioReport> out;
        for (auto seed : seeds) {
          double lambda = 1.0;
          Field f = family_member(family, g, 0, seed);
          if (family == InputFamily::multiscale) {
            f = multiscale_field(g, 0.5, -2, -1, seed);
            lambda = 1.4 / 4.0;
          }
          out.push_back(check_bernstein(dilate(f, lev), 3.0, lambda * std::ldexp(1.0, lev)));
        }
        return out;
      });

      const std::pair<CommutatorVariant, const char*> coms[] = {
          {CommutatorVariant::com1, "com1"}, {CommutatorVariant::com2, "com2"}, {CommutatorVariant::com3, "com3"}};
      for (auto [variant, name] : coms) {
        record(name, family, [&, variant = variant](int lev) {
          std::vector<RatioReport> out;
          for (auto seed : seeds) {
            const Field w = dilate(family_member(family, g, -1, seed), lev);
            const Field v = dilate(family_member(family, g, 0, seed + 100), lev);
            out.push_back(check_commutator(w, v, 0.25, 3.0, variant, dec(lev)).aggregate);
          }
          return out;
        });
      }

      const std::pair<ProductVariant, ProductParams> prods[] = {{ProductVariant::prod1, {0.5, 2.0, 1.0, 0}},
                                                                {ProductVariant::prod2, {0.25, 3.0, 1.0, 0}},
                                                                {ProductVariant::prod3, {0.5, 3.0, 1.0, -1}},
                                                                {ProductVariant::prod4, {0.5, 3.0, 1.0, -1}}};
      for (std::size_t i = 0; i < 4; ++i) {
        record("prod" + std::to_string(i + 1), family, [&, i](int lev) {
          ProductParams params = prods[i].second;
          params.J += lev;
          std::vector<RatioReport> out;
          for (auto seed : seeds) {
            const Field a = dilate(family_member(family, g, 0, seed), lev);
            const Field b = dilate(family_member(family, g, 0, seed + 100), lev);
            out.push_back(check_product_law(a, b, prods[i].first, params, dec(lev)));
          }
          return out;
        });
      }

      record("composition exp(u)-1", family, [&](int lev) {
        std::vector<RatioReport> out;
        for (auto seed : seeds) {
          Field u = family_member(family, g, 0, seed);
          u = (0.5 / lp_norm(u, kInf)) * u;
          const auto rep = check_composition([](double x) { return std::expm1(x); }, dilate(u, lev), {0.25, 2.0, 1.0},
                                             dec(lev));
          out.push_back(rep.ratio);
        }
        return out;
      });

      std::map<std::string, std::map<int, std::vector<RatioReport>>> pieces;
      for (int lev = 0; lev < levels; ++lev) {
        for (auto seed : seeds) {
          const Field w = dilate(family_member(family, g, -1, seed), lev);
          const Field z = dilate(family_member(family, g, 0, seed + 100), lev);
          const auto rep = check_remainder(w, z, 1.0, 3.0, -2 + lev, dec(lev));
          pieces["remainder total"][lev].push_back(rep.total);
          pieces["remainder R1"][lev].push_back(rep.piece1);
          pieces["remainder R2"][lev].push_back(rep.piece2);
          pieces["remainder R3"][lev].push_back(rep.piece3);
          pieces["remainder endpoint s=3/2"][lev].push_back(check_remainder(w, z, 1.5, 3.0, -2 + lev, dec(lev)).total);
        }
      }
      for (const auto& [name, per_level] : pieces)
        record(name, family, [&per_level = per_level](int lev) { return per_level.at(lev); });
    }

    struct Demo {
      std::string name;
      std::function<double(double)> A;
      double B, X0, p;
    };
    const Demo demos[] = {
        {"A=0 B=1 X0=1 p=1", [](double) { return 0.0; }, 1.0, 1.0, 1.0},
        {"A=1 B=0 X0=1 p=2", [](double) { return 1.0; }, 0.0, 1.0, 2.0},
        {"A=1 B=1 X0=0.5 p=2", [](double) { return 1.0; }, 1.0, 0.5, 2.0},
        {"A=1+sin^2 B=0.5 X0=2 p=3", [](double t) { return 1.0 + std::sin(t) * std::sin(t); }, 0.5, 2.0, 3.0},
    };
    for (const auto& demo : demos) {
      const auto trace = ode_lemma_demo(demo.A, demo.B, demo.X0, demo.p, 10.0);
      r.checks.push_back(
          Verdict::holds("ODE lemma " + demo.name, trace.holds, "min slack " + fmt(trace.min_slack)));
    }
  });
}

CriterionReport criterion_stability(AcceptanceContext& ctx) {
  return evaluate(10, "stability metric", [&](CriterionReport& r) {
    RunConfig c = with_amplitude(ctx.setup().base(), ctx.small_amplitude(), 10.0);
    std::vector<Trajectory> runs;
    const double dt0 = 0.025;
    for (double dt : {dt0, dt0 / 2, dt0 / 4}) {
      c.dt = dt;
      runs.push_back(simulate_run(c));
    }
    const auto d = decomposition_for(runs[0].grid());
    const double d1 = stability_metric(runs[0], runs[1], d, c.p, c.J0).values.back();
    const double d2 = stability_metric(runs[1], runs[2], d, c.p, c.J0).values.back();
    const double prediction = 8.0 * d2;  // third order: the dt gap is 2^3 times the dt/2 gap
    r.checks.push_back(Verdict::at_most("deltaU(dt, dt/2) at T=10 against 10x the order-3 prediction", d1,
                                        10.0 * prediction,
                                        "observed order " + fmt(std::log2(d1 / d2)) + ", deltaU(dt/2, dt/4) " + fmt(d2)));

    c.dt = dt0;
    const Trajectory again = simulate_run(c);
    const auto same = stability_metric(runs[0], again, d, c.p, c.J0);
    Trajectory zero(runs[0].grid());
    for (double t : runs[0].times()) zero.append(SystemState::zero(runs[0].grid(), t));
    const double scale = stability_metric(zero, runs[0], d, c.p, c.J0).values.front();
    const double worst = *std::max_element(same.values.begin(), same.values.end());
    r.checks.push_back(Verdict::at_most("max_t deltaU for identical data", worst, 1e-12 * scale));
  });
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"spectrum",    "rescaling",    "lyapunov",  "decay",     "relaxation",
                                                 "boundedness", "inequalities", "stability", "acceptance"};
  return names;
}

SuiteReport verify_suite(const std::string& suite, AcceptanceContext& ctx) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw RangeError("unknown suite '" + suite + "' (expected one of " + list + ")");
  }
  SuiteReport rep;
  rep.suite = suite;
  const bool all = suite == "acceptance";
  if (all || suite == "spectrum") {
    rep.criteria.push_back(criterion_partition_of_unity());
    rep.criteria.push_back(criterion_linear_spectrum());
  }
  if (all || suite == "rescaling") rep.criteria.push_back(criterion_rescaling(ctx));
  if (all || suite == "lyapunov") rep.criteria.push_back(criterion_lyapunov(ctx));
  if (all || suite == "decay") {
    rep.criteria.push_back(criterion_decay(ctx));
    rep.criteria.push_back(criterion_negative_besov(ctx));
  }
  if (all || suite == "relaxation") rep.criteria.push_back(criterion_relaxation(ctx));
  if (all || suite == "boundedness") rep.criteria.push_back(criterion_boundedness(ctx));
  if (all || suite == "inequalities") rep.criteria.push_back(criterion_inequality_lab());
  if (all || suite == "stability") rep.criteria.push_back(criterion_stability(ctx));
  return rep;
}

}  // namespace pdh
