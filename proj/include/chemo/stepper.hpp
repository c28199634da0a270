#pragma once

#include "chemo/field.hpp"
#include "chemo/helmholtz.hpp"
#include "chemo/motility.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

/// u_t = Delta(gamma(v) u) + a u - b u^sigma,  -Delta v + v = u.
struct Parameters {
  double a = 1.0;
  double b = 1.0;
  double sigma = 2.0;
  Motility motility = Motility::exponential(1.0);

  /// Throws std::invalid_argument unless a > 0, b > 0, sigma > 1.
  void validate() const;
};

enum class Scheme { ExplicitEuler, Heun };

struct StepperConfig {
  Scheme scheme = Scheme::ExplicitEuler;
  double cfl_safety = 0.9;
  double dt_max = std::numeric_limits<double>::infinity();
  double blowup_threshold = 1e8;

  void validate() const;
};

struct SimState {
  double t = 0.0;
  ScalarField u;
  ScalarField v;
  double dt_last = 0.0;
};

/// Raised when u becomes non-finite or exceeds the blow-up threshold.
class BlowUpDetected : public std::runtime_error {
 public:
  BlowUpDetected(double t, double linf_u);
  double time() const { return time_; }
  double linf_u() const { return linf_u_; }

 private:
  double time_;
  double linf_u_;
};

struct StepEvent {
  double t = 0.0;
  std::string what;
};

/// Largest step that keeps the explicit Euler update node-wise nonnegative:
/// cfl_safety / (2 dim gamma(min v) / h^2 + b (max u)^(sigma-1)), capped at dt_max.
double stable_dt(const SimState& state, const Parameters& params, const StepperConfig& config);

/// Advances states on one grid; holds the Helmholtz tables for that grid.
class Stepper {
 public:
  Stepper(const Grid& grid, Parameters params, StepperConfig config);

  const Grid& grid() const { return solver_.grid(); }
  const Parameters& params() const { return params_; }
  const StepperConfig& config() const { return config_; }
  const HelmholtzSolver<double>& solver() const { return solver_; }

  /// State at time t with v resolved from u.
  SimState make_state(const ScalarField& u, double t = 0.0) const;

  double stable_dt(const SimState& state) const;

  /// One step of size dt (callers keep dt <= stable_dt). Heun clamps
  /// negatives above -1e-13 and appends larger violations to events.
  SimState step(const SimState& state, double dt, std::vector<StepEvent>* events = nullptr) const;

  /// One step of size stable_dt(state).
  SimState step(const SimState& state, std::vector<StepEvent>* events = nullptr) const {
    return step(state, stable_dt(state), events);
  }

  /// Delta_h(gamma(v) u) + a u - b u^sigma.
  ArrayXd rhs(const ArrayXd& u, const ArrayXd& v) const;

 private:
  SimState finish(const SimState& prev, ArrayXd u_next, double dt) const;

  HelmholtzSolver<double> solver_;
  Parameters params_;
  StepperConfig config_;
};

/// Free-function form; builds a Stepper for the state's grid.
SimState step(const SimState& state, const Parameters& params, const StepperConfig& config);

struct RunOptions {
  double t_end = 0.0;
  /// Observation spacing in time; <= 0 observes only the start and the end.
  double observe_every = 0.0;
  /// Additional times the run must land on exactly (snapshots).
  std::vector<double> extra_times;
};

struct RunHooks {
  std::function<void(const SimState&)> on_observe;
  std::function<void(const SimState& before, const SimState& after)> on_step;
  std::function<void(const SimState&)> on_extra_time;
};

struct RunSummary {
  SimState final_state;
  std::size_t steps = 0;
  std::vector<StepEvent> events;
};

/// Integrates from u0 (u0 >= 0, not identically zero) to options.t_end.
/// Step sizes are truncated so the run lands exactly on every observation
/// time, every extra time and t_end. BlowUpDetected propagates.
RunSummary run(const ScalarField& u0, const Parameters& params, const StepperConfig& config,
               const RunOptions& options, const RunHooks& hooks = {});

}  // namespace chemo
