// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "chemo/constants.hpp"
#include "chemo/diagnostics.hpp"
#include "chemo/helmholtz.hpp"
#include "chemo/stepper.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chemo;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; <= 0 means none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScalarField cosine_data(const Grid& g, double mean, double amp) {
  return ScalarField::sample(g, [&](double x, double y) {
    double c = std::cos(pi * x / g.length(0));
    if (g.dim() == 2) c *= std::cos(pi * y / g.length(1));
    return mean + amp * c;
  });
}

template <typename Scalar>
ArrayX<Scalar> random_field(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ArrayX<Scalar> a(n);
  for (Index k = 0; k < n; ++k) a[k] = static_cast<Scalar>(d(rng));
  return a;
}

/// Worst relative residual and worst max-principle excess over `count` fields.
template <typename Scalar>
std::pair<double, double> helmholtz_sweep(const Grid& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const HelmholtzSolver<Scalar> solver(g);
  double residual = 0.0, excess = 0.0;
  for (int i = 0; i < count; ++i) {
    const ArrayX<Scalar> u = random_field<Scalar>(g.size(), rng);
    const ArrayX<Scalar> v = solver.solve(u);
    const Scalar norm = u.abs().maxCoeff();
    residual = std::max(residual, static_cast<double>((solver.apply(v) - u).abs().maxCoeff() / norm));
    excess = std::max(excess, static_cast<double>(std::max(v.maxCoeff() - u.maxCoeff(), u.minCoeff() - v.minCoeff())));
  }
  return {residual, excess};
}

// Shared record of every accepted Euler step in the runs of criteria 2-4.
struct StepAudit {
  double worst_mass_law = 0.0;
  double min_u = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
};
StepAudit g_audit;

RunHooks audited(const Parameters& p, std::function<void(const SimState&)> observe = {}) {
  RunHooks h;
  h.on_observe = std::move(observe);
  h.on_step = [p](const SimState& before, const SimState& after) {
    const Grid& g = before.u.grid();
    const double m0 = integrate(before.u);
    const double m1 = integrate(after.u);
    const double law = after.dt_last * (p.a * m0 - p.b * integrate(g, before.u.values().pow(p.sigma)));
    g_audit.worst_mass_law = std::max(g_audit.worst_mass_law, std::abs((m1 - m0) - law) / std::max(m0, m1));
    g_audit.min_u = std::min(g_audit.min_u, after.u.values().minCoeff());
    ++g_audit.steps;
  };
  return h;
}

Outcome helmholtz_exactness() {
  const Grid g1 = Grid::line(1.0, 256);
  const Grid g2 = Grid::rect(1.0, 1.0, 64, 64);
  const auto [r1, m1] = helmholtz_sweep<long double>(g1, 100, 1);
  const auto [r2, m2] = helmholtz_sweep<long double>(g2, 100, 2);
  const auto [d1, dm1] = helmholtz_sweep<double>(g1, 100, 1);
  const auto [d2, dm2] = helmholtz_sweep<double>(g2, 100, 2);
  Outcome o;
  o.pass = r1 <= 1e-12 && r2 <= 1e-12 && m1 <= 1e-12 && m2 <= 1e-12;
  o.detail = fmt("long double residual 1D=%.2e 2D=%.2e, max-principle excess %.1e/%.1e; "
                 "double residual 1D=%.2e 2D=%.2e (excess %.1e/%.1e)",
                 r1, r2, m1, m2, d1, d2, dm1, dm2);
  return o;
}

Outcome logistic_oracle() {
  const Grid g = Grid::line(1.0, 64);
  const Parameters p{1.0, 1.0, 2.0, Motility::exponential(1.0)};
  StepperConfig c;
  c.dt_max = 1e-4;
  const RunSummary r = run(ScalarField::constant(g, 0.5), p, c, RunOptions{1.0}, audited(p));
  const ArrayXd& u = r.final_state.u.values();
  const double err = (u - 1.0 / (1.0 + std::exp(-1.0))).abs().maxCoeff();
  const double spread = u.maxCoeff() - u.minCoeff();
  return {err <= 1e-3 && spread <= 1e-13, fmt("max error %.2e, spatial variation %.1e, %zu steps", err, spread, r.steps)};
}

struct BoundRuns {
  double worst_mass_ratio = 0.0;  // max of mass / y(t)
  double worst_v_ratio = 0.0;     // max of linf_v / Q
  bool done = false;
};

BoundRuns& bound_runs_1d() {
  static BoundRuns result;
  if (result.done) return result;
  const Grid g = Grid::line(1.0, 128);
  for (double sigma : {1.5, 2.5}) {
    const Parameters p{1.0, 1.0, sigma, Motility::exponential(1.0)};
    const ScalarField u0 = cosine_data(g, 2.0, 0.5);
    const DiagnosticsContext ctx = DiagnosticsContext::make(u0, p);
    const BernoulliEnvelope env = ctx.envelope();
    run(u0, p, StepperConfig{}, RunOptions{5.0, 0.01}, audited(p, [&](const SimState& s) {
          result.worst_mass_ratio = std::max(result.worst_mass_ratio, integrate(s.u) / env(s.t));
          result.worst_v_ratio = std::max(result.worst_v_ratio, linf_norm(s.v) / ctx.Q);
        }));
  }
  result.done = true;
  return result;
}

Outcome bernoulli_bound() {
  const BoundRuns& r = bound_runs_1d();
  return {r.worst_mass_ratio <= 1.0 + 1e-8, fmt("max mass / y(t) = %.12f over sigma in {1.5, 2.5}", r.worst_mass_ratio)};
}

Outcome signal_bound() {
  const BoundRuns& r1 = bound_runs_1d();
  const Grid g = Grid::rect(1.0, 1.0, 64, 64);
  const Parameters p{1.0, 1.0, 2.0, Motility::exponential(1.0)};
  const ScalarField u0 = cosine_data(g, 2.0, 0.5);
  const double Q = compute_Q(u0, p);
  double worst2 = 0.0;
  const RunSummary s = run(u0, p, StepperConfig{}, RunOptions{5.0, 0.05}, audited(p, [&](const SimState& st) {
                             worst2 = std::max(worst2, linf_norm(st.v) / Q);
                           }));
  const double worst = std::max(r1.worst_v_ratio, worst2);
  return {worst <= 1.0 + 1e-6, fmt("max linf_v / Q: 1D %.4f, 2D(64x64) %.4f (%zu steps)", r1.worst_v_ratio, worst2, s.steps)};
}

Outcome mass_law() {
  return {g_audit.steps > 0 && g_audit.worst_mass_law <= 1e-12 && g_audit.min_u >= 0.0,
          fmt("%zu steps, worst relative mass-law defect %.2e, min u %.3e", g_audit.steps, g_audit.worst_mass_law,
              g_audit.min_u)};
}

Outcome convergence() {
  const Grid g = Grid::line(1.0, 64);
  const Parameters p{1.0, 1.0, 2.0, Motility::exponential(1.0)};
  const ScalarField u0 = cosine_data(g, 1.0, 0.3);
  const ConstantsReport rep = compute_constants(u0, p);
  // (K1 K2 / 4)^(1/2) a^(1/2) sup^(1/2) with K1 = K2 = a = sup = 1.
  const double b2_hand = std::sqrt(1.0 / 4.0);
  DiagnosticsRecorder rec(DiagnosticsContext::make(u0, p));
  run(u0, p, StepperConfig{}, RunOptions{50.0, 0.1}, RunHooks{[&](const SimState& s) { rec.observe(s); }});
  const DiagnosticsRow& last = rec.rows().back();
  const auto t_star = detect_Tstar(rec.rows(), 2.0, rec.context().envelope());
  const DecayReport decay = t_star ? lyapunov_decay_check(rec.rows(), *t_star) : DecayReport{false};
  const bool ok = std::abs(rep.b2 - b2_hand) <= 1e-15 && p.b > rep.b2 && last.t == 50.0 && last.dist_u < 1e-3 &&
                  last.dist_v < 1e-3 && t_star.has_value() && decay.monotone && decay.integrals_finite;
  return {ok, fmt("b2=%.6f (hand %.6f), T*=%.2f, dist_u=%.2e dist_v=%.2e at t=%.0f, energy monotone=%d over %zu pairs",
                  rep.b2, b2_hand, t_star.value_or(-1.0), last.dist_u, last.dist_v, last.t, int(decay.monotone),
                  decay.pairs_checked)};
}

/// Random nonnegative fields of several shapes, rescaled to mass <= 2.
std::vector<ArrayXd> coercivity_fields(const Grid& g, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> spiky(0.0, 1.5);
  std::vector<ArrayXd> out;
  for (int i = 0; i < count; ++i) {
    ArrayXd u(g.size());
    switch (i % 4) {
      case 0:
        for (Index k = 0; k < u.size(); ++k) u[k] = unit(rng) * 3.0;
        break;
      case 1:
        for (Index k = 0; k < u.size(); ++k) u[k] = spiky(rng);
        break;
      case 2: {
        const double c = unit(rng), w = 0.02 + 0.2 * unit(rng);
        for (Index k = 0; k < u.size(); ++k) {
          const double x = g.coordinate(0, k);
          u[k] = 0.05 * unit(rng) + std::exp(-(x - c) * (x - c) / (w * w));
        }
        break;
      }
      default:
        for (Index k = 0; k < u.size(); ++k) u[k] = 1.0 + 0.9 * std::cos((1 + i % 7) * pi * g.coordinate(0, k));
    }
    const double target = 2.0 * unit(rng);
    u *= target / integrate(g, u);
    out.push_back(u);
  }
  return out;
}

Outcome coercivity() {
  const Grid g = Grid::line(1.0, 128);
  std::mt19937_64 rng(115);
  double worst = 0.0;
  int failures = 0;
  for (double sigma : {1.5, 2.0, 3.0}) {
    const double K1 = compute_K1(sigma, 1.0);
    const double q = compute_q(sigma);
    for (const ArrayXd& u : coercivity_fields(g, 200, rng)) {
      const InequalityCheck c = check_coercivity(ScalarField(g, u), 1.0, sigma, K1, q);
      if (!c.ok) ++failures;
      if (c.rhs > 0.0) worst = std::max(worst, c.lhs / c.rhs);
    }
  }
  return {failures == 0, fmt("600 fields, %d violations, max lhs/rhs = %.6f", failures, worst)};
}

Outcome signal_energy() {
  const Grid g = Grid::line(1.0, 128);
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> unit(0.0, 3.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    ArrayXd u(g.size());
    for (Index k = 0; k < u.size(); ++k) u[k] = unit(rng);
    const ScalarField uf(g, u);
    const ScalarField v = solve_helmholtz(uf);
    const InequalityCheck c = check_signal_energy(uf, v, mean(v), 1.0, 2.0, 1.0);
    if (!c.ok) ++failures;
    worst = std::max(worst, c.lhs / c.rhs);
  }
  return {failures == 0, fmt("100 fields, %d violations, max lhs/rhs = %.6f", failures, worst)};
}

Outcome poincare() {
  const Grid g = Grid::line(1.0, 256);
  const PoincareEstimate e = estimate_poincare(g, 2.0);
  const double lambda1 = neumann_stencil_eigenvalue<double>(1, 256, g.spacing(0));
  const double eig = 1.0 / std::sqrt(lambda1);
  const double rel_pi = std::abs(e.xi * pi - 1.0);
  const double rel_eig = std::abs(e.xi / eig - 1.0);
  return {rel_pi <= 0.01 && rel_eig <= 1e-6,
          fmt("xi=%.10f, |xi pi - 1|=%.2e, |xi/xi_eig - 1|=%.2e, %d starts", e.xi, rel_pi, rel_eig, e.starts)};
}

Outcome self_convergence() {
  const Grid g = Grid::line(1.0, 32);
  const Parameters p{1.0, 1.0, 2.0, Motility::exponential(1.0)};
  const ScalarField u0 = cosine_data(g, 1.0, 0.3);
  auto solve = [&](Scheme scheme, double dt) {
    StepperConfig c{scheme};
    c.dt_max = dt;
    return run(u0, p, c, RunOptions{1.0}).final_state.u.values();
  };
  auto orders = [&](Scheme scheme) {
    const ArrayXd ref = solve(scheme, 1e-5);
    std::vector<double> err;
    for (double dt : {4e-4, 2e-4, 1e-4}) err.push_back((solve(scheme, dt) - ref).abs().maxCoeff());
    return std::pair{std::log2(err[0] / err[1]), std::log2(err[1] / err[2])};
  };
  const auto [h1, h2] = orders(Scheme::Heun);
  const auto [e1, e2] = orders(Scheme::ExplicitEuler);
  auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
  return {in(h1, 1.7, 2.2) && in(h2, 1.7, 2.2) && in(e1, 0.8, 1.2) && in(e2, 0.8, 1.2),
          fmt("Heun orders %.3f, %.3f; Euler orders %.3f, %.3f", h1, h2, e1, e2)};
}

Outcome regime_table() {
  struct Case {
    int n;
    double sigma;
    double b;
    Motility motility;
    double b2;
    double b1;
    const char* expected;
  };
  const Motility e1 = Motility::exponential(1.0);
  const Motility alg = Motility::algebraic_offset(0.5, 1.0);
  const std::vector<Case> cases = {
      {1, 1.5, 0.1, e1, 0.5, 1.0, "GlobalBounded(1)"},
      {3, 2.5, 0.1, e1, 0.5, 3.0, "GlobalBounded(2)"},
      {3, 2.0, 5.0, e1, 10.0, 3.0, "GlobalBounded(3)"},
      {2, 1.5, 1.0, e1, 0.5, 3.0, "Converges(1)"},
      {3, 2.5, 1.0, e1, 0.5, 3.0, "Converges(2)"},
      {3, 2.0, 5.0, e1, 0.5, 3.0, "Converges(3)"},
      {3, 1.9, 1.0, alg, 0.5, 3.0, "Converges(4)"},
      {3, 1.9, 1.0, e1, 0.5, 3.0, "Unclassified"},
      {3, 2.0, 2.0, e1, 0.5, 3.0, "Unclassified"},
  };
  int wrong = 0;
  std::ostringstream labels;
  for (const Case& c : cases) {
    ConstantsReport r;
    r.b2 = c.b2;
    r.b1_est = c.b1;
    r.convexity_inf = inf_convexity_ratio(c.motility);
    const std::string got = classify_regime(c.n, Parameters{1.0, c.b, c.sigma, c.motility}, r).label();
    if (got != c.expected) {
      ++wrong;
      labels << " [n=" << c.n << " sigma=" << c.sigma << " b=" << c.b << ": got " << got << ", want " << c.expected
             << "]";
    }
  }
  return {wrong == 0, fmt("%zu cases, %d mismatches", cases.size(), wrong) + labels.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Helmholtz exactness", 5.0, helmholtz_exactness},
      {2, "homogeneous logistic oracle", 10.0, logistic_oracle},
      {3, "Bernoulli mass bound", 30.0, bernoulli_bound},
      {4, "signal bound v <= Q", 0.0, signal_bound},
      {5, "discrete mass law and positivity", 0.0, mass_law},
      {6, "convergence to equilibrium", 60.0, convergence},
      {7, "coercivity inequality", 5.0, coercivity},
      {8, "signal energy estimate (sigma >= 2)", 0.0, signal_energy},
      {9, "Poincare estimator", 10.0, poincare},
      {10, "time self-convergence", 0.0, self_convergence},
      {11, "regime classifier table", 0.0, regime_table},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += fmt("; runtime %.2f s exceeds %.0f s", secs, c.time_limit);
    }
    if (!o.pass) ++failed;
    std::printf("%s [%2d] %-38s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
