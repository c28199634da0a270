#include "chemo/constants.hpp"

#include "chemo/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace chemo {

double equilibrium(double a, double b, double sigma) {
  if (!(sigma > 1.0)) throw std::invalid_argument("sigma must exceed 1");
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("a and b must be positive");
  return std::pow(a / b, 1.0 / (sigma - 1.0));
}

double compute_Q(const ScalarField& u0, const Parameters& params) {
  params.validate();
  if (!(u0.values() >= 0.0).all()) throw std::invalid_argument("compute_Q needs u0 >= 0");
  const double s = params.sigma;
  const double g0 = params.motility.gamma(0.0);
  const double first = linf_norm(solve_helmholtz(u0));
  const double second =
      (s - 1.0) / (g0 * std::pow(params.b, 1.0 / (s - 1.0))) * std::pow((params.a + 2.0 * g0) / s, s / (s - 1.0));
  return first + second;
}

double compute_q(double sigma) {
  if (!(sigma > 1.0)) throw std::invalid_argument("sigma must exceed 1");
  return sigma < 2.0 ? 2.0 / (3.0 - sigma) : 2.0;
}

double compute_K1(double sigma, double omega_measure) {
  if (!(sigma > 1.0)) throw std::invalid_argument("sigma must exceed 1");
  if (!(omega_measure > 0.0)) throw std::invalid_argument("domain measure must be positive");
  if (sigma >= 2.0) return 1.0;
  const double two_omega = 2.0 * omega_measure;
  const double first = std::pow(two_omega, (sigma + 1.0) / (3.0 - sigma)) * std::pow(2.0, 2.0 - sigma) / (sigma - 1.0);
  const double second =
      std::pow(2.0, 4.0 / (3.0 - sigma)) * std::pow(two_omega, 2.0 - sigma) / (1.0 - std::pow(2.0, -(sigma - 1.0)));
  return first + second;
}

double compute_K2(double sigma, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
  return sigma < 2.0 ? xi * xi : 1.0;
}

double compute_b2(double a, double sigma, const Motility& motility, double K1, double K2) {
  if (!(a > 0.0) || !(sigma > 1.0) || !(K1 > 0.0) || !(K2 > 0.0)) {
    throw std::invalid_argument("compute_b2 needs positive a, K1, K2 and sigma > 1");
  }
  const double e = (sigma - 1.0) / 2.0;
  return std::pow(K1 * K2 / 4.0, e) * std::pow(a, -(sigma - 3.0) / 2.0) * std::pow(sup_ratio(motility, 0.0), e);
}

bool admissible_poincare_exponent(int n, double d) {
  if (!(d >= 1.0) || n < 1) return false;
  if (n <= 2) return std::isfinite(d);
  return d < 2.0 * n / (n - 2.0);
}

namespace {

ArrayXd project_mean_zero(const Grid& grid, const ArrayXd& f) { return f - mean(grid, f); }

struct PoincareQuotient {
  const Grid& grid;
  double d;

  /// log of ||f - mean f||_d / sqrt(int |grad f|^2)
  double value(const ArrayXd& f) const {
    const ArrayXd g = project_mean_zero(grid, f);
    const double num = lp_norm(grid, g, d);
    const double den = gradient_sq_integral(grid, g);
    if (!(den > 0.0) || !(num > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(num) - 0.5 * std::log(den);
  }

  /// Gradient of value() in the weighted L^2 inner product.
  ArrayXd gradient(const ArrayXd& f) const {
    const ArrayXd g = project_mean_zero(grid, f);
    const ArrayXd ag = g.abs();
    const ArrayXd dpow = d == 2.0 ? g : ArrayXd(ag.pow(d - 1.0) * g.sign());
    const double lpd = integrate(grid, d == 2.0 ? ArrayXd(g.square()) : ArrayXd(ag.pow(d)));
    const double energy = gradient_sq_integral(grid, g);
    return project_mean_zero(grid, dpow / lpd) + discrete_laplacian(grid, g) / energy;
  }
};

}  // namespace

PoincareEstimate estimate_poincare(const Grid& grid, double q, const PoincareOptions& options) {
  if (!(q > 1.0)) throw std::invalid_argument("Poincare exponent needs q > 1");
  const double d = q / (q - 1.0);
  if (!admissible_poincare_exponent(grid.dim(), d)) {
    throw std::invalid_argument("L^" + std::to_string(d) + " is outside the admissible Poincare range");
  }
  if (options.starts < 1) throw std::invalid_argument("Poincare estimate needs at least one start");

  const HelmholtzSolver<double> solver(grid);
  const PoincareQuotient J{grid, d};
  PoincareEstimate best;
  best.exponent = d;
  best.starts = options.starts;
  double best_value = -std::numeric_limits<double>::infinity();

  for (int s = 0; s < options.starts; ++s) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal;
    ArrayXd f(grid.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = normal(rng);
    f = project_mean_zero(grid, f);

    double value = J.value(f);
    double tau = 1.0;
    int stalled = 0;
    for (int it = 0; it < options.max_iterations && stalled < 3; ++it) {
      const ArrayXd dir = project_mean_zero(grid, solver.solve(J.gradient(f)));
      if (!dir.allFinite() || dir.abs().maxCoeff() == 0.0) break;
      tau *= 2.0;
      bool improved = false;
      for (int halvings = 0; halvings < 60; ++halvings, tau /= 2.0) {
        ArrayXd trial = f + tau * dir;
        const double tv = J.value(trial);
        if (tv > value) {
          const double gain = tv - value;
          f = trial / std::sqrt(integrate(grid, trial.square()));
          value = tv;
          improved = true;
          stalled = gain < options.tolerance ? stalled + 1 : 0;
          break;
        }
      }
      if (!improved) break;
    }
    if (value > best_value) {
      best_value = value;
      best.extremal = ScalarField(grid, f);
    }
  }
  best.xi = std::exp(best_value);
  if (d == 2.0) {
    best.eigen_xi = 1.0 / std::sqrt(solver.first_eigenvalue());
    best.estimated = false;
  }
  return best;
}

namespace {

/// Centred first difference; zero on boundary nodes normal to the axis,
/// matching the mirrored ghosts.
ArrayXd central_difference(const Grid& grid, const ArrayXd& f, int axis) {
  const Index nx = grid.cells(0), ny = grid.cells(1);
  const double h = grid.spacing(axis);
  ArrayXd out = ArrayXd::Zero(f.size());
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      if (axis == 0) {
        if (i == 0 || i == nx - 1) continue;
        out[grid.index(i, j)] = (f[grid.index(i + 1, j)] - f[grid.index(i - 1, j)]) / (2 * h);
      } else {
        if (j == 0 || j == ny - 1) continue;
        out[grid.index(i, j)] = (f[grid.index(i, j + 1)] - f[grid.index(i, j - 1)]) / (2 * h);
      }
    }
  }
  return out;
}

ArrayXd second_difference(const Grid& grid, const ArrayXd& f, int axis) {
  const Index nx = grid.cells(0), ny = grid.cells(1);
  const double h = grid.spacing(axis);
  ArrayXd out(f.size());
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      Index lo, hi;
      if (axis == 0) {
        lo = grid.index(i > 0 ? i - 1 : 1, j);
        hi = grid.index(i < nx - 1 ? i + 1 : nx - 2, j);
      } else {
        lo = grid.index(i, j > 0 ? j - 1 : 1);
        hi = grid.index(i, j < ny - 1 ? j + 1 : ny - 2);
      }
      out[grid.index(i, j)] = (f[lo] - 2 * f[grid.index(i, j)] + f[hi]) / (h * h);
    }
  }
  return out;
}

ArrayXd gradient_magnitude(const Grid& grid, const ArrayXd& f) {
  ArrayXd sq = central_difference(grid, f, 0).square();
  if (grid.dim() == 2) sq += central_difference(grid, f, 1).square();
  return sq.sqrt();
}

ArrayXd hessian_magnitude(const Grid& grid, const ArrayXd& f) {
  ArrayXd sq = second_difference(grid, f, 0).square();
  if (grid.dim() == 2) {
    sq += second_difference(grid, f, 1).square();
    sq += 2.0 * central_difference(grid, central_difference(grid, f, 0), 1).square();
  }
  return sq.sqrt();
}

double pow_integral(const Grid& grid, const ArrayXd& f, double p) { return integrate(grid, f.abs().pow(p)); }

/// Structured and random probe fields for the G / R quotients.
std::vector<ArrayXd> probe_fields(const Grid& grid) {
  std::vector<ArrayXd> fields;
  const double pi = std::numbers::pi;
  const double lx = grid.length(0);
  const double ly = grid.dim() == 2 ? grid.length(1) : 1.0;
  const int kmax = static_cast<int>(std::min<Index>(grid.cells(0) / 4, 16));
  if (grid.dim() == 1) {
    for (int k = 1; k <= kmax; ++k) {
      fields.push_back(ScalarField::sample(grid, [&](double x, double) { return std::cos(k * pi * x / lx); }).values());
      fields.push_back(
          ScalarField::sample(grid, [&](double x, double) { return 1.0 + std::cos(k * pi * x / lx); }).values());
    }
  } else {
    const int kmax2 = std::min(kmax, 8);
    for (int kx = 0; kx <= kmax2; ++kx) {
      for (int ky = 0; ky <= kmax2; ++ky) {
        if (kx == 0 && ky == 0) continue;
        fields.push_back(ScalarField::sample(grid, [&](double x, double y) {
                           return std::cos(kx * pi * x / lx) * std::cos(ky * pi * y / ly);
                         }).values());
      }
    }
  }
  // Gaussian bumps of several widths at the centre and at a corner.
  const double h = grid.min_spacing();
  for (double width : {3 * h, 6 * h, 12 * h, 0.1 * lx, 0.25 * lx}) {
    for (double cx : {0.0, 0.5 * lx, 0.3 * lx}) {
      const double cy = grid.dim() == 2 ? cx / lx * ly : 0.0;
      fields.push_back(ScalarField::sample(grid, [&](double x, double y) {
                         const double r2 = (x - cx) * (x - cx) + (grid.dim() == 2 ? (y - cy) * (y - cy) : 0.0);
                         return std::exp(-r2 / (2 * width * width));
                       }).values());
    }
  }
  // Seeded random fields, raw and smoothed once or twice.
  const HelmholtzSolver<double> solver(grid);
  std::mt19937_64 rng(0xabcdefULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < 6; ++r) {
    ArrayXd f(grid.size());
    for (Index i = 0; i < f.size(); ++i) f[i] = unit(rng);
    fields.push_back(f);
    fields.push_back(solver.solve(f));
    fields.push_back(solver.solve(solver.solve(f)));
  }
  return fields;
}

}  // namespace

double gradient_lp_norm(const ScalarField& f, double p) {
  return lp_norm(f.grid(), gradient_magnitude(f.grid(), f.values()), p);
}

double sobolev_w2p_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("Sobolev norm needs p >= 1");
  const Grid& g = f.grid();
  const ArrayXd& x = f.values();
  const double sum =
      pow_integral(g, x, p) + pow_integral(g, gradient_magnitude(g, x), p) + pow_integral(g, hessian_magnitude(g, x), p);
  return std::pow(sum, 1.0 / p);
}

KappaEstimate estimate_kappa_b1(const ScalarField& u0, const Parameters& params, const Grid& grid) {
  const int n = grid.dim();
  KappaEstimate est;
  est.p = n / 2 + 1;
  const double p = est.p;

  const HelmholtzSolver<double> solver(grid);
  const auto fields = probe_fields(grid);
  est.fields_tested = static_cast<int>(fields.size());
  for (const ArrayXd& f : fields) {
    const ScalarField field(grid, f);
    const double grad = gradient_lp_norm(field, 2 * (p + 1));
    const double denom = std::sqrt(sobolev_w2p_norm(field, p + 1) * linf_norm(field));
    if (grad > 0.0 && denom > 0.0 && grad / denom > est.G) {
      est.G = grad / denom;
      est.G_extremal = field;
    }
    const double src = lp_norm(field, p);
    if (src > 0.0) {
      const double r = sobolev_w2p_norm(ScalarField(grid, solver.solve(f)), p) / src;
      if (r > est.R) {
        est.R = r;
        est.R_extremal = field;
      }
    }
  }

  Parameters reference = params;
  reference.b = 1.0;
  reference.sigma = 2.0;
  est.Q = compute_Q(u0, reference);
  est.sup_ratio_Q = sup_ratio(params.motility, 0.0, std::min(est.Q, params.motility.domain_end()));
  est.kappa =
      (std::pow(est.G, 2 * (p + 1)) * std::pow(est.R, p + 1) * std::pow(est.Q, p + 1) + 1.0) * est.sup_ratio_Q;
  const int half = n / 2;
  est.b1 = half * est.kappa / 2.0 + 1.0;
  return est;
}

ConstantsReport compute_constants(const ScalarField& u0, const Parameters& params, const ConstantsOptions& options) {
  params.validate();
  const Grid& grid = u0.grid();
  ConstantsReport r;
  r.dimension = grid.dim();
  r.omega_measure = grid.measure();
  r.u_star = equilibrium(params.a, params.b, params.sigma);
  r.Q = compute_Q(u0, params);
  r.q_exponent = compute_q(params.sigma);
  r.K1 = compute_K1(params.sigma, r.omega_measure);

  const PoincareEstimate xi = estimate_poincare(grid, r.q_exponent, options.poincare);
  // The eigenvalue route is exact on the grid whenever it applies.
  r.xi = xi.eigen_xi.value_or(xi.xi);
  r.estimated.xi = xi.estimated;

  r.K2 = compute_K2(params.sigma, r.xi);
  r.b2 = compute_b2(params.a, params.sigma, params.motility, r.K1, r.K2);
  r.sup_ratio_inf = sup_ratio(params.motility, 0.0);
  r.sup_ratio_Q = sup_ratio(params.motility, 0.0, std::min(r.Q, params.motility.domain_end()));
  r.convexity_inf = inf_convexity_ratio(params.motility);

  const KappaEstimate kappa = estimate_kappa_b1(u0, params, grid);
  r.kappa_est = kappa.kappa;
  r.b1_est = kappa.b1;
  return r;
}

std::string to_text(const ConstantsReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto line = [&](const char* key, double value, bool estimated = false) {
    os << key << '=' << value << '\n';
    if (estimated) os << key << "_estimated=true\n";
  };
  os << "dimension=" << r.dimension << '\n';
  line("omega_measure", r.omega_measure);
  line("u_star", r.u_star);
  line("Q", r.Q);
  line("q_exponent", r.q_exponent);
  line("K1", r.K1);
  line("K2", r.K2);
  line("xi", r.xi, r.estimated.xi);
  line("b2", r.b2);
  line("kappa_est", r.kappa_est, r.estimated.kappa_est);
  line("b1_est", r.b1_est, r.estimated.b1_est);
  line("sup_ratio_Q", r.sup_ratio_Q);
  line("sup_ratio_inf", r.sup_ratio_inf);
  line("convexity_inf", r.convexity_inf);
  return os.str();
}

std::string Regime::label() const {
  switch (kind) {
    case RegimeKind::Converges:
      return "Converges(" + std::to_string(*convergence_case) + ")";
    case RegimeKind::GlobalBounded:
      return "GlobalBounded(" + std::to_string(*bounded_case) + ")";
    case RegimeKind::Unclassified:
      break;
  }
  return "Unclassified";
}

Regime classify_regime(int n, const Parameters& params, const ConstantsReport& report) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  params.validate();
  const double s = params.sigma;
  const double b = params.b;
  Regime regime;
  std::ostringstream why;
  why << std::setprecision(6);

  bool bounded_uses_b1 = false;
  if (n <= 2) {
    regime.bounded_case = 1;
  } else if (s > 2.0) {
    regime.bounded_case = 2;
  } else if (s == 2.0 && b > report.b1_est) {
    regime.bounded_case = 3;
    bounded_uses_b1 = true;
  }

  bool converge_uses_b1 = false;
  const bool above_b2 = b > report.b2;
  if (n <= 2 && above_b2) {
    regime.convergence_case = 1;
  } else if (n >= 3 && s > 2.0 && above_b2) {
    regime.convergence_case = 2;
  } else if (n >= 3 && s == 2.0 && b > std::max(report.b1_est, report.b2)) {
    regime.convergence_case = 3;
    converge_uses_b1 = true;
  } else if (n >= 3 && s > 2.0 - 2.0 / n && s < 2.0 && above_b2 && report.convexity_inf > n / 2.0) {
    regime.convergence_case = 4;
  }

  if (regime.convergence_case) {
    regime.kind = RegimeKind::Converges;
    regime.provisional = converge_uses_b1;
    why << "b=" << b << " > b2=" << report.b2;
    if (converge_uses_b1) why << ", b1_est=" << report.b1_est;
    if (*regime.convergence_case == 4) why << ", convexity_inf=" << report.convexity_inf << " > n/2=" << n / 2.0;
  } else if (regime.bounded_case) {
    regime.kind = RegimeKind::GlobalBounded;
    regime.provisional = bounded_uses_b1;
    why << "n=" << n << ", sigma=" << s;
    if (bounded_uses_b1) why << ", b=" << b << " > b1_est=" << report.b1_est;
    why << "; convergence not covered (b=" << b << ", b2=" << report.b2 << ")";
  } else {
    regime.provisional = n >= 3 && s == 2.0;
    why << "n=" << n << ", sigma=" << s << ", b=" << b << ", b2=" << report.b2 << ", b1_est=" << report.b1_est
        << ", convexity_inf=" << report.convexity_inf;
  }
  if (regime.provisional) why << " (provisional: b1 is estimated)";
  regime.reason = why.str();
  return regime;
}

}  // namespace chemo
