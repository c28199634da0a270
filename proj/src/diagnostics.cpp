#include "chemo/diagnostics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace chemo {

namespace {

constexpr double kMassSlack = 1e-10;
constexpr double kInequalitySlack = 1e-8;
constexpr double kVBoundSlack = 1e-6;
constexpr double kDecaySlack = 1e-10;

/// x - u* - u* ln(x/u*), by its Taylor series in r = x/u* - 1 near u*.
double energy_density(double x, double u_star) {
  const double r = (x - u_star) / u_star;
  if (std::abs(r) < 1e-3) {
    const double r2 = r * r;
    return u_star * r2 * (0.5 - r / 3.0 + r2 / 4.0 - r2 * r / 5.0 + r2 * r2 / 6.0);
  }
  return (x - u_star) - u_star * std::log(x / u_star);
}

}  // namespace

double lyapunov(const ScalarField& u, double u_star, bool* floored) {
  if (!(u_star > 0.0)) throw std::invalid_argument("u* must be positive");
  if (!(u.values() >= 0.0).all()) throw std::invalid_argument("energy functional needs u >= 0");
  bool any_floored = false;
  const ArrayXd phi = u.values().unaryExpr([&](double x) {
    if (x < kLyapunovFloor) {
      any_floored = true;
      x = kLyapunovFloor;
    }
    return energy_density(x, u_star);
  });
  if (floored != nullptr) *floored = any_floored;
  return integrate(u.grid(), phi);
}

double BernoulliEnvelope::operator()(double t) const {
  if (!(mass0 > 0.0)) throw std::invalid_argument("Bernoulli envelope needs mass0 > 0");
  const double e = sigma - 1.0;
  const double c = b / (a * std::pow(omega_measure, e));
  return std::pow(c + (std::pow(mass0, -e) - c) * std::exp(-a * e * t), -1.0 / e);
}

double BernoulliEnvelope::limit() const { return std::pow(a / b, 1.0 / (sigma - 1.0)) * omega_measure; }

double BernoulliEnvelope::crossing_time(double level) const {
  if (mass0 <= level) return 0.0;
  if (level <= limit()) return std::numeric_limits<double>::infinity();
  const double e = sigma - 1.0;
  const double c = b / (a * std::pow(omega_measure, e));
  const double ratio = (std::pow(level, -e) - c) / (std::pow(mass0, -e) - c);
  return -std::log(ratio) / (a * e);
}

double mass_bound(double t, double a, double b, double sigma, double mass0, double omega_measure) {
  return BernoulliEnvelope{a, b, sigma, mass0, omega_measure}(t);
}

bool check_mass_bound(const DiagnosticsRow& row, double bound) { return row.mass <= bound * (1.0 + kMassSlack); }

InequalityCheck check_coercivity(const ScalarField& u, double u_star, double sigma, double K1, double q) {
  const ArrayXd& x = u.values();
  const ArrayXd dev = x - u_star;
  InequalityCheck c;
  const double norm = lp_norm(u.grid(), dev, q);
  c.lhs = norm * norm;
  const ArrayXd damping = (x.pow(sigma - 1.0) - std::pow(u_star, sigma - 1.0)) * dev;
  c.rhs = K1 * std::pow(u_star, 2.0 - sigma) * integrate(u.grid(), damping);
  c.ok = c.lhs <= c.rhs * (1.0 + kInequalitySlack);
  return c;
}

InequalityCheck check_signal_energy(const ScalarField& u, const ScalarField& v, double v_mean, double K2, double q,
                                    double u_star) {
  const Grid& grid = u.grid();
  InequalityCheck c;
  c.lhs = gradient_sq_integral(v) + integrate(grid, (v.values() - v_mean).square());
  const double norm = lp_norm(grid, u.values() - u_star, q);
  c.rhs = K2 * norm * norm;
  c.ok = c.lhs <= c.rhs * (1.0 + kInequalitySlack);
  return c;
}

DiagnosticsContext DiagnosticsContext::make(const ScalarField& u0, const Parameters& params) {
  DiagnosticsContext c;
  c.a = params.a;
  c.b = params.b;
  c.sigma = params.sigma;
  c.u_star = equilibrium(params.a, params.b, params.sigma);
  c.Q = compute_Q(u0, params);
  c.K1 = compute_K1(params.sigma, u0.grid().measure());
  c.q = compute_q(params.sigma);
  c.mass0 = integrate(u0);
  c.omega_measure = u0.grid().measure();
  return c;
}

void DiagnosticsRecorder::observe(const SimState& state) {
  const Grid& grid = state.u.grid();
  const ArrayXd& u = state.u.values();
  const ArrayXd& v = state.v.values();
  const double us = context_.u_star;

  DiagnosticsRow row;
  row.t = state.t;
  row.mass = integrate(state.u);
  row.linf_u = linf_norm(state.u);
  row.linf_v = linf_norm(state.v);
  row.l2_u = lp_norm(state.u, 2.0);
  row.lyapunov = lyapunov(state.u, us, &row.floored);
  row.mass_bound = context_.envelope()(state.t);
  row.v_bound_ok = row.linf_v <= context_.Q * (1.0 + kVBoundSlack);
  row.dist_u = linf_norm(u - us);
  row.dist_v = linf_norm(v - us);
  row.grad_v_sq = gradient_sq_integral(state.v);
  row.min_u = u.minCoeff();
  const double v_mean = mean(state.v);
  row.v_variance = integrate(grid, (v - v_mean).square());
  const double dq = lp_norm(grid, u - us, context_.q);
  row.dist_q_sq = dq * dq;

  if (!below_twice_equilibrium_ && row.mass <= 2.0 * us * context_.omega_measure) below_twice_equilibrium_ = true;
  row.coercivity_applicable = below_twice_equilibrium_;
  if (row.coercivity_applicable) {
    const InequalityCheck c = check_coercivity(state.u, us, context_.sigma, context_.K1, context_.q);
    row.ineq115_lhs = c.lhs;
    row.ineq115_rhs = c.rhs;
    row.coercivity_ok = c.ok;
  } else {
    row.ineq115_lhs = row.ineq115_rhs = std::numeric_limits<double>::quiet_NaN();
  }

  if (!rows_.empty()) {
    const double prev = rows_.back().lyapunov;
    row.lyap_decreasing = row.lyapunov <= prev + kDecaySlack * (1.0 + prev);
  }
  rows_.push_back(row);
}

const char* DiagnosticsRecorder::csv_header() {
  return "t,mass,linf_u,linf_v,l2_u,lyapunov,mass_bound,v_bound_ok,dist_u,dist_v,grad_v_sq,ineq115_lhs,ineq115_rhs,"
         "lyap_decreasing,floored";
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << DiagnosticsRecorder::csv_header() << '\n';
  os << std::setprecision(17);
  for (const DiagnosticsRow& r : rows) {
    os << r.t << ',' << r.mass << ',' << r.linf_u << ',' << r.linf_v << ',' << r.l2_u << ',' << r.lyapunov << ','
       << r.mass_bound << ',' << int(r.v_bound_ok) << ',' << r.dist_u << ',' << r.dist_v << ',' << r.grad_v_sq << ','
       << r.ineq115_lhs << ',' << r.ineq115_rhs << ',' << int(r.lyap_decreasing) << ',' << int(r.floored) << '\n';
  }
}

void DiagnosticsRecorder::write_csv(std::ostream& os) const { write_diagnostics_csv(os, rows_); }

std::optional<double> detect_Tstar(const std::vector<DiagnosticsRow>& rows, double alpha,
                                   const BernoulliEnvelope& envelope) {
  if (!(alpha > 1.0)) throw std::invalid_argument("detect_Tstar needs alpha > 1");
  const double level = alpha * envelope.limit();
  const double guaranteed = envelope.crossing_time(level);
  std::optional<double> candidate;
  for (const DiagnosticsRow& r : rows) {
    if (candidate && r.t > guaranteed) break;
    if (r.mass <= level) {
      if (!candidate) candidate = r.t;
    } else {
      candidate.reset();
    }
  }
  return candidate;
}

DecayReport lyapunov_decay_check(const std::vector<DiagnosticsRow>& rows, double t_star) {
  DecayReport report;
  const DiagnosticsRow* prev = nullptr;
  for (const DiagnosticsRow& r : rows) {
    if (r.t < t_star) continue;
    if (prev != nullptr) {
      const double dt = r.t - prev->t;
      report.v_variance_time_integral += 0.5 * dt * (r.v_variance + prev->v_variance);
      report.dist_q_sq_time_integral += 0.5 * dt * (r.dist_q_sq + prev->dist_q_sq);
      if (!r.floored && !prev->floored) {
        ++report.pairs_checked;
        if (r.lyapunov > prev->lyapunov + kDecaySlack * (1.0 + prev->lyapunov) && report.monotone) {
          report.monotone = false;
          report.first_violation_time = r.t;
        }
      }
    }
    prev = &r;
  }
  report.integrals_finite =
      std::isfinite(report.v_variance_time_integral) && std::isfinite(report.dist_q_sq_time_integral);
  return report;
}

}  // namespace chemo
