#include "chemo/motility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chemo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int sign(double x) { return (x > 0) - (x < 0); }

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2 * h[k] + h[k - 1];
    const double w2 = h[k] + 2 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  // One-sided three-point end slopes, limited to keep the cubic monotone.
  auto edge = [](double h0, double h1, double m0, double m1) {
    double e = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(e) != sign(m0)) return 0.0;
    if (sign(m0) != sign(m1) && std::abs(e) > 3 * std::abs(m0)) return 3 * m0;
    return e;
  };
  d[0] = edge(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

void require_nonnegative(double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("motility argument must satisfy v >= 0");
}

/// Golden-section maximisation of f on [lo, hi].
template <typename Fn>
double golden_max(Fn&& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1 + std::abs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({f1, f2, f(lo), f(hi)});
}

constexpr int kDenseSamples = 10000;

}  // namespace

TabulatedMotility::TabulatedMotility(std::vector<double> v, std::vector<double> gamma, std::vector<double> dgamma,
                                     std::vector<double> ddgamma)
    : v_(std::move(v)) {
  const std::size_t n = v_.size();
  if (n < 2) throw std::invalid_argument("motility table needs at least two rows");
  if (gamma.size() != n || dgamma.size() != n || ddgamma.size() != n) {
    throw std::invalid_argument("motility table columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v_[i]) || !std::isfinite(gamma[i]) || !std::isfinite(dgamma[i]) || !std::isfinite(ddgamma[i])) {
      throw std::invalid_argument("motility table row " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(v_[i] > v_[i - 1])) {
      throw std::invalid_argument("motility table v must be strictly increasing (row " + std::to_string(i) + ")");
    }
  }
  if (v_.front() < 0.0) throw std::invalid_argument("motility table starts below v = 0");
  columns_[0].y = std::move(gamma);
  columns_[1].y = std::move(dgamma);
  columns_[2].y = std::move(ddgamma);
  for (auto& c : columns_) c.slope = pchip_slopes(v_, c.y);
}

TabulatedMotility TabulatedMotility::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open motility table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty motility table");
  {
    std::string header;
    for (char ch : line) {
      if (!std::isspace(static_cast<unsigned char>(ch))) header.push_back(ch);
    }
    if (header != "v,gamma,dgamma,ddgamma") {
      throw std::runtime_error(path + ":1: expected header 'v,gamma,dgamma,ddgamma'");
    }
  }
  std::vector<double> cols[4];
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= 4) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": too many columns");
      try {
        std::size_t used = 0;
        cols[c].push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": cannot parse '" + cell + "' as a number");
      }
      ++c;
    }
    if (c != 4) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 4 columns");
  }
  try {
    return TabulatedMotility(cols[0], cols[1], cols[2], cols[3]);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

double TabulatedMotility::interpolate(int column, double v) const {
  if (!(v >= v_.front() && v <= v_.back())) {
    throw std::out_of_range("v = " + std::to_string(v) + " lies outside the motility table [" +
                            std::to_string(v_.front()) + ", " + std::to_string(v_.back()) + "]");
  }
  const Column& c = columns_[column];
  std::size_t k = static_cast<std::size_t>(std::upper_bound(v_.begin(), v_.end(), v) - v_.begin());
  k = std::clamp<std::size_t>(k, 1, v_.size() - 1) - 1;
  const double h = v_[k + 1] - v_[k];
  const double t = (v - v_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * c.y[k] + (t3 - 2 * t2 + t) * h * c.slope[k] + (-2 * t3 + 3 * t2) * c.y[k + 1] +
         (t3 - t2) * h * c.slope[k + 1];
}

Motility::Motility(Spec spec) : spec_(std::move(spec)) {
  std::visit(overloaded{
                 [](const ExponentialMotility& e) {
                   if (!(e.chi > 0.0) || !std::isfinite(e.chi)) {
                     throw std::invalid_argument("exponential motility needs chi > 0");
                   }
                 },
                 [](const AlgebraicOffsetMotility& a) {
                   if (!(a.k > 0.0) || !std::isfinite(a.k)) {
                     throw std::invalid_argument("algebraic motility needs k > 0");
                   }
                   if (!(a.c >= 1.0) || !std::isfinite(a.c)) {
                     throw std::invalid_argument("algebraic motility needs c >= 1");
                   }
                 },
                 [](const TabulatedMotility&) {},
             },
             spec_);
}

std::string Motility::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ExponentialMotility& e) { os << "exponential(chi=" << e.chi << ")"; },
                 [&](const AlgebraicOffsetMotility& a) { os << "algebraic(k=" << a.k << ", c=" << a.c << ")"; },
                 [&](const TabulatedMotility& t) {
                   os << "tabulated(" << t.v().size() << " rows on [" << t.v_min() << ", " << t.v_max() << "])";
                 },
             },
             spec_);
  return os.str();
}

double Motility::gamma(double v) const {
  require_nonnegative(v);
  return std::visit(overloaded{
                        [v](const ExponentialMotility& e) { return std::exp(-e.chi * v); },
                        [v](const AlgebraicOffsetMotility& a) { return a.c * std::pow(1 + v, -a.k); },
                        [v](const TabulatedMotility& t) { return t.gamma(v); },
                    },
                    spec_);
}

double Motility::dgamma(double v) const {
  require_nonnegative(v);
  return std::visit(overloaded{
                        [v](const ExponentialMotility& e) { return -e.chi * std::exp(-e.chi * v); },
                        [v](const AlgebraicOffsetMotility& a) { return -a.c * a.k * std::pow(1 + v, -a.k - 1); },
                        [v](const TabulatedMotility& t) { return t.dgamma(v); },
                    },
                    spec_);
}

double Motility::ddgamma(double v) const {
  require_nonnegative(v);
  return std::visit(
      overloaded{
          [v](const ExponentialMotility& e) { return e.chi * e.chi * std::exp(-e.chi * v); },
          [v](const AlgebraicOffsetMotility& a) { return a.c * a.k * (a.k + 1) * std::pow(1 + v, -a.k - 2); },
          [v](const TabulatedMotility& t) { return t.ddgamma(v); },
      },
      spec_);
}

ArrayXd Motility::gamma(const ArrayXd& v) const {
  if (!(v >= 0.0).all()) throw std::invalid_argument("motility argument must satisfy v >= 0");
  return std::visit(overloaded{
                        [&](const ExponentialMotility& e) -> ArrayXd { return (-e.chi * v).exp(); },
                        [&](const AlgebraicOffsetMotility& a) -> ArrayXd { return a.c * (1 + v).pow(-a.k); },
                        [&](const TabulatedMotility& t) -> ArrayXd { return v.unaryExpr([&](double x) { return t.gamma(x); }); },
                    },
                    spec_);
}

double Motility::domain_end() const {
  if (const auto* t = std::get_if<TabulatedMotility>(&spec_)) return t->v_max();
  return std::numeric_limits<double>::infinity();
}

double eval_gamma(const Motility& m, double v) { return m.gamma(v); }
double eval_dgamma(const Motility& m, double v) { return m.dgamma(v); }
double eval_ddgamma(const Motility& m, double v) { return m.ddgamma(v); }

HypothesisReport check_hypothesis(const Motility& m, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("check_hypothesis needs v_max > 0");
  HypothesisReport report;
  auto flag = [&](double v, std::size_t index, std::string what) {
    report.ok = false;
    report.violations.push_back({v, index, std::move(what)});
  };

  double lo = 0.0;
  double hi = v_max;
  bool analytic = false;
  if (const auto* t = std::get_if<TabulatedMotility>(&m.spec())) {
    const auto& v = t->v();
    const auto& g = t->gamma_column();
    const auto& dg = t->dgamma_column();
    const auto& ddg = t->ddgamma_column();
    if (t->v_min() > 0.0) flag(t->v_min(), 0, "table does not start at v = 0");
    if (t->v_max() < v_max) flag(t->v_max(), v.size() - 1, "table ends before v_max");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(g[i] > 0.0)) flag(v[i], i, "gamma <= 0");
      if (!(dg[i] < 0.0)) flag(v[i], i, "gamma' >= 0");
      if (i + 1 < v.size() && !(g[i + 1] < g[i])) flag(v[i], i, "gamma not strictly decreasing");
    }
    // Column consistency: centred differences of gamma and gamma' against
    // the tabulated derivatives.
    auto scale = [](const std::vector<double>& c) {
      double s = 0.0;
      for (double x : c) s = std::max(s, std::abs(x));
      return s;
    };
    const double s1 = scale(dg), s2 = scale(ddg);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const double dv = v[i + 1] - v[i - 1];
      if (std::abs((g[i + 1] - g[i - 1]) / dv - dg[i]) > TabulatedMotility::kConsistencyTolerance * s1) {
        flag(v[i], i, "gamma' column inconsistent with gamma");
      }
      if (std::abs((dg[i + 1] - dg[i - 1]) / dv - ddg[i]) > TabulatedMotility::kConsistencyTolerance * s2) {
        flag(v[i], i, "gamma'' column inconsistent with gamma'");
      }
    }
    lo = t->v_min();
    hi = std::min(v_max, t->v_max());
  } else {
    // Both parametric families have gamma > 0 and gamma' < 0 in closed form
    // once their parameters are valid; sampling then only guards against
    // non-finite evaluation (exp underflow is not a violation).
    analytic = true;
  }

  if (hi > lo) {
    for (int s = 0; s <= kDenseSamples; ++s) {
      const double v = lo + (hi - lo) * s / kDenseSamples;
      const double g = m.gamma(v), dg = m.dgamma(v);
      if (!std::isfinite(g) || !std::isfinite(dg)) {
        flag(v, HypothesisViolation::kNoIndex, "non-finite gamma");
        continue;
      }
      if (analytic) continue;
      if (!(g > 0.0)) flag(v, HypothesisViolation::kNoIndex, "interpolated gamma <= 0");
      if (!(dg < 0.0)) flag(v, HypothesisViolation::kNoIndex, "interpolated gamma' >= 0");
    }
  }
  return report;
}

double sup_ratio(const Motility& m, double v_lo, double v_hi) {
  if (!(v_lo >= 0.0)) throw std::invalid_argument("sup_ratio needs v_lo >= 0");
  if (!(v_hi > v_lo)) throw std::invalid_argument("sup_ratio needs v_hi > v_lo");
  return std::visit(overloaded{
                        [&](const ExponentialMotility& e) { return e.chi * e.chi * std::exp(-e.chi * v_lo); },
                        [&](const AlgebraicOffsetMotility& a) {
                          return a.c * a.k * a.k * std::pow(1 + v_lo, -a.k - 2);
                        },
                        [&](const TabulatedMotility& t) {
                          double hi = v_hi;
                          if (std::isinf(hi)) {
                            hi = t.v_max();
                          } else if (hi > t.v_max()) {
                            throw std::out_of_range("sup_ratio upper limit lies beyond the motility table");
                          }
                          if (v_lo < t.v_min()) throw std::out_of_range("sup_ratio lower limit lies below the table");
                          auto ratio = [&](double v) {
                            const double d = t.dgamma(v);
                            return d * d / t.gamma(v);
                          };
                          int best = 0;
                          double best_val = -1.0;
                          for (int s = 0; s <= kDenseSamples; ++s) {
                            const double r = ratio(v_lo + (hi - v_lo) * s / kDenseSamples);
                            if (r > best_val) {
                              best_val = r;
                              best = s;
                            }
                          }
                          const double step = (hi - v_lo) / kDenseSamples;
                          const double a = std::max(v_lo, v_lo + (best - 1) * step);
                          const double b = std::min(hi, v_lo + (best + 1) * step);
                          return std::max(best_val, golden_max(ratio, a, b));
                        },
                    },
                    m.spec());
}

double inf_convexity_ratio(const Motility& m) {
  return std::visit(overloaded{
                        [](const ExponentialMotility&) { return 1.0; },
                        [](const AlgebraicOffsetMotility& a) { return (a.k + 1) / a.k; },
                        [](const TabulatedMotility& t) {
                          double best = std::numeric_limits<double>::infinity();
                          const double lo = t.v_min(), hi = t.v_max();
                          for (int s = 0; s <= kDenseSamples; ++s) {
                            const double v = lo + (hi - lo) * s / kDenseSamples;
                            const double d = t.dgamma(v);
                            if (!(d < 0.0)) {
                              throw std::invalid_argument("gamma' vanishes or changes sign at v = " + std::to_string(v));
                            }
                            best = std::min(best, t.gamma(v) * t.ddgamma(v) / (d * d));
                          }
                          return best;
                        },
                    },
                    m.spec());
}

}  // namespace chemo
