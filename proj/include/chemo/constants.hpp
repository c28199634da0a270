#pragma once

#include "chemo/field.hpp"
#include "chemo/stepper.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace chemo {

/// u* = (a/b)^(1/(sigma-1)).
double equilibrium(double a, double b, double sigma);

/// Upper bound for v along the whole trajectory:
/// ||(I - Delta)^-1 u0||_inf + (sigma-1)/(gamma(0) b^(1/(sigma-1))) ((a + 2 gamma(0))/sigma)^(sigma/(sigma-1)).
double compute_Q(const ScalarField& u0, const Parameters& params);

/// 2/(3-sigma) for sigma in (1,2), 2 for sigma >= 2.
double compute_q(double sigma);

/// Coercivity constant relating ||u - u*||_q^2 to the damping integral.
double compute_K1(double sigma, double omega_measure);

/// xi^2 for sigma < 2, 1 otherwise.
double compute_K2(double sigma, double xi);

/// Damping threshold above which the energy functional decays.
double compute_b2(double a, double sigma, const Motility& motility, double K1, double K2);

/// d admissible for ||f - mean f||_{L^d} <= xi ||grad f||_{L^2} in n dimensions:
/// d in [1, 2n/(n-2)_+).
bool admissible_poincare_exponent(int n, double d);

struct PoincareOptions {
  int starts = 8;
  std::uint64_t seed = 0x5eedc0ffeeULL;
  int max_iterations = 500;
  double tolerance = 1e-14;
};

struct PoincareEstimate {
  double xi = 0.0;
  double exponent = 2.0;   // d = q/(q-1)
  int starts = 0;
  bool estimated = true;   // false when the eigenvalue route applies (d = 2)
  std::optional<double> eigen_xi;  // 1/sqrt(lambda_1) of the discrete Neumann Laplacian, d = 2 only
  ScalarField extremal;
};

/// Largest value of ||f - mean f||_{L^d} / ||grad f||_{L^2} found by
/// H^1-preconditioned gradient ascent from several seeded random starts.
/// This is a lower estimate of the true constant.
PoincareEstimate estimate_poincare(const Grid& grid, double q, const PoincareOptions& options = {});

struct KappaEstimate {
  int p = 1;
  double G = 0.0;          // Gagliardo-Nirenberg quotient maximum
  double R = 0.0;          // elliptic regularity quotient maximum
  double Q = 0.0;          // Q evaluated at b = 1, sigma = 2
  double sup_ratio_Q = 0.0;
  double kappa = 0.0;
  double b1 = 0.0;
  int fields_tested = 0;
  ScalarField G_extremal;
  ScalarField R_extremal;
};

/// Discrete W^{k,p} pieces used by the estimators.
double sobolev_w2p_norm(const ScalarField& f, double p);
double gradient_lp_norm(const ScalarField& f, double p);

/// Numerical lower estimates of G(p), R(p) with p = floor(n/2) + 1, and the
/// kappa / b1 values assembled from them.
KappaEstimate estimate_kappa_b1(const ScalarField& u0, const Parameters& params, const Grid& grid);

struct ConstantsReport {
  int dimension = 1;
  double omega_measure = 1.0;
  double u_star = 0.0;
  double Q = 0.0;
  double q_exponent = 2.0;
  double K1 = 1.0;
  double K2 = 1.0;
  double xi = 0.0;
  double b2 = 0.0;
  double kappa_est = 0.0;
  double b1_est = 0.0;
  double sup_ratio_Q = 0.0;
  double sup_ratio_inf = 0.0;
  double convexity_inf = 0.0;

  struct Flags {
    bool xi = false;
    bool kappa_est = true;
    bool b1_est = true;
  } estimated;
};

struct ConstantsOptions {
  PoincareOptions poincare;
};

ConstantsReport compute_constants(const ScalarField& u0, const Parameters& params, const ConstantsOptions& options = {});

/// key=value lines, one constant per line; estimated constants are followed
/// by a "<key>_estimated=true" line.
std::string to_text(const ConstantsReport& report);

enum class RegimeKind { GlobalBounded, Converges, Unclassified };

struct Regime {
  RegimeKind kind = RegimeKind::Unclassified;
  /// Case number of the boundedness result that applies, if any.
  std::optional<int> bounded_case;
  /// Case number of the convergence result that applies, if any.
  std::optional<int> convergence_case;
  /// True when the verdict depends on b1_est.
  bool provisional = false;
  std::string reason;

  /// "Converges(2)", "GlobalBounded(1)" or "Unclassified".
  std::string label() const;
};

/// Which boundedness / convergence case a configuration falls in.
Regime classify_regime(int n, const Parameters& params, const ConstantsReport& report);

}  // namespace chemo
