#pragma once

#include "chemo/grid.hpp"

#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace chemo {

/// gamma(v) = exp(-chi v)
struct ExponentialMotility {
  double chi = 1.0;
};

/// gamma(v) = c (1 + v)^(-k)
struct AlgebraicOffsetMotility {
  double k = 1.0;
  double c = 1.0;
};

/// Sampled gamma with its first two derivatives, interpolated column by
/// column with monotone (Fritsch-Carlson) cubics.
class TabulatedMotility {
 public:
  /// Relative tolerance of the finite-difference cross-check between columns.
  static constexpr double kConsistencyTolerance = 5e-2;

  TabulatedMotility(std::vector<double> v, std::vector<double> gamma, std::vector<double> dgamma,
                    std::vector<double> ddgamma);

  /// Reads a CSV with header "v,gamma,dgamma,ddgamma".
  static TabulatedMotility load_csv(const std::string& path);

  const std::vector<double>& v() const { return v_; }
  const std::vector<double>& gamma_column() const { return columns_[0].y; }
  const std::vector<double>& dgamma_column() const { return columns_[1].y; }
  const std::vector<double>& ddgamma_column() const { return columns_[2].y; }
  double v_min() const { return v_.front(); }
  double v_max() const { return v_.back(); }

  double gamma(double v) const { return interpolate(0, v); }
  double dgamma(double v) const { return interpolate(1, v); }
  double ddgamma(double v) const { return interpolate(2, v); }

 private:
  struct Column {
    std::vector<double> y;
    std::vector<double> slope;
  };
  double interpolate(int column, double v) const;

  std::vector<double> v_;
  Column columns_[3];
};

enum class MotilityFamily { Exponential, AlgebraicOffset, Tabulated };

/// A density-suppressed motility function gamma(v) on [0, inf).
class Motility {
 public:
  using Spec = std::variant<ExponentialMotility, AlgebraicOffsetMotility, TabulatedMotility>;

  explicit Motility(Spec spec);

  static Motility exponential(double chi) { return Motility(ExponentialMotility{chi}); }
  static Motility algebraic_offset(double k, double c = 1.0) { return Motility(AlgebraicOffsetMotility{k, c}); }

  MotilityFamily family() const { return static_cast<MotilityFamily>(spec_.index()); }
  const Spec& spec() const { return spec_; }
  std::string describe() const;

  double gamma(double v) const;
  double dgamma(double v) const;
  double ddgamma(double v) const;

  /// gamma applied node-wise.
  ArrayXd gamma(const ArrayXd& v) const;

  /// Right end of the domain on which gamma can be evaluated.
  double domain_end() const;

 private:
  Spec spec_;
};

double eval_gamma(const Motility& m, double v);
double eval_dgamma(const Motility& m, double v);
double eval_ddgamma(const Motility& m, double v);

struct HypothesisViolation {
  static constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();
  double v = 0.0;
  std::size_t index = kNoIndex;  // table row, when the violation comes from tabulated data
  std::string what;
};

struct HypothesisReport {
  bool ok = true;
  std::vector<HypothesisViolation> violations;
};

/// Verifies gamma > 0 and gamma' < 0 on [0, v_max] (analytic checks plus
/// at least 10^4 samples).
HypothesisReport check_hypothesis(const Motility& m, double v_max);

/// sup of |gamma'(v)|^2 / gamma(v) over [v_lo, v_hi]; v_hi may be +inf.
double sup_ratio(const Motility& m, double v_lo, double v_hi = std::numeric_limits<double>::infinity());

/// inf over v >= 0 of gamma(v) gamma''(v) / |gamma'(v)|^2.
double inf_convexity_ratio(const Motility& m);

}  // namespace chemo
