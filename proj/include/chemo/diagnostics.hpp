#pragma once

#include "chemo/constants.hpp"
#include "chemo/stepper.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

namespace chemo {

/// Nodes below this value enter the energy functional at this value.
inline constexpr double kLyapunovFloor = 1e-300;

/// F(u) = integral of u - u* - u* ln(u/u*). Sets *floored when some node
/// had to be clamped to kLyapunovFloor.
double lyapunov(const ScalarField& u, double u_star, bool* floored = nullptr);

/// Explicit solution y(t) of y' = a y - b |Omega|^(1-sigma) y^sigma, y(0) = mass0.
struct BernoulliEnvelope {
  double a = 1.0;
  double b = 1.0;
  double sigma = 2.0;
  double mass0 = 1.0;
  double omega_measure = 1.0;

  double operator()(double t) const;
  /// Limit u* |Omega| as t -> infinity.
  double limit() const;
  /// First time with y(t) <= level (0 if already below, +inf if never).
  double crossing_time(double level) const;
};

double mass_bound(double t, double a, double b, double sigma, double mass0, double omega_measure);

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  double l2_u = 0.0;
  double lyapunov = 0.0;
  double mass_bound = 0.0;
  bool v_bound_ok = true;
  double dist_u = 0.0;
  double dist_v = 0.0;
  double grad_v_sq = 0.0;
  double ineq115_lhs = 0.0;  // NaN until the mass first drops below 2 u* |Omega|
  double ineq115_rhs = 0.0;
  bool lyap_decreasing = true;
  bool floored = false;

  // Not part of the CSV.
  double min_u = 0.0;
  double v_variance = 0.0;  // integral of (v - mean v)^2
  double dist_q_sq = 0.0;   // ||u - u*||_q^2
  bool coercivity_applicable = false;
  bool coercivity_ok = true;
};

/// mass <= bound (1 + 1e-10).
bool check_mass_bound(const DiagnosticsRow& row, double bound);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// ||u - u*||_q^2 <= K1 u*^(2-sigma) integral (u^(sigma-1) - u*^(sigma-1)) (u - u*),
/// with multiplicative slack 1e-8. Meaningful once the mass is at most 2 u* |Omega|.
InequalityCheck check_coercivity(const ScalarField& u, double u_star, double sigma, double K1, double q);

/// integral |grad v|^2 + integral (v - v_mean)^2 <= K2 ||u - u*||_q^2, slack 1e-8.
InequalityCheck check_signal_energy(const ScalarField& u, const ScalarField& v, double v_mean, double K2, double q,
                                    double u_star);

/// Everything a row needs besides the state.
struct DiagnosticsContext {
  double a = 1.0;
  double b = 1.0;
  double sigma = 2.0;
  double u_star = 1.0;
  double Q = 0.0;
  double K1 = 1.0;
  double q = 2.0;
  double mass0 = 0.0;
  double omega_measure = 1.0;

  static DiagnosticsContext make(const ScalarField& u0, const Parameters& params);
  BernoulliEnvelope envelope() const { return {a, b, sigma, mass0, omega_measure}; }
};

/// Observer that turns states into rows.
class DiagnosticsRecorder {
 public:
  explicit DiagnosticsRecorder(DiagnosticsContext context) : context_(context) {}

  void observe(const SimState& state);
  const std::vector<DiagnosticsRow>& rows() const { return rows_; }
  const DiagnosticsContext& context() const { return context_; }

  static const char* csv_header();
  void write_csv(std::ostream& os) const;

 private:
  DiagnosticsContext context_;
  std::vector<DiagnosticsRow> rows_;
  bool below_twice_equilibrium_ = false;
};

/// Header plus one line per row, 17 significant digits, booleans as 0/1.
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);

/// First observation time from which mass <= alpha u* |Omega| holds at every
/// later observation up to the envelope crossing time; past that time the
/// envelope guarantees it.
std::optional<double> detect_Tstar(const std::vector<DiagnosticsRow>& rows, double alpha,
                                   const BernoulliEnvelope& envelope);

struct DecayReport {
  bool monotone = true;
  std::size_t pairs_checked = 0;
  std::optional<double> first_violation_time;
  double v_variance_time_integral = 0.0;
  double dist_q_sq_time_integral = 0.0;
  bool integrals_finite = true;
};

/// F(t_{k+1}) <= F(t_k) + 1e-10 (1 + F(t_k)) for consecutive observations at
/// or after t_star (floored rows skipped), plus trapezoidal time integrals of
/// integral (v - mean v)^2 and ||u - u*||_q^2 over the same span.
DecayReport lyapunov_decay_check(const std::vector<DiagnosticsRow>& rows, double t_star);

}  // namespace chemo
