#include "chemo/stepper.hpp"

#include <algorithm>
#include <cmath>

namespace chemo {

namespace {

constexpr double kHeunClampFloor = -1e-13;

}  // namespace

void Parameters::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be positive");
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must exceed 1");
}

void StepperConfig::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be positive");
}

BlowUpDetected::BlowUpDetected(double t, double linf_u)
    : std::runtime_error("blow-up detected at t = " + std::to_string(t) + " (max u = " + std::to_string(linf_u) + ")"),
      time_(t),
      linf_u_(linf_u) {}

Stepper::Stepper(const Grid& grid, Parameters params, StepperConfig config)
    : solver_(grid), params_(std::move(params)), config_(config) {
  params_.validate();
  config_.validate();
}

SimState Stepper::make_state(const ScalarField& u, double t) const {
  if (!(u.grid() == grid())) throw std::invalid_argument("field lives on a different grid");
  return SimState{t, u, solver_.solve(u), 0.0};
}

double Stepper::stable_dt(const SimState& state) const { return chemo::stable_dt(state, params_, config_); }

double stable_dt(const SimState& state, const Parameters& params, const StepperConfig& config) {
  const ArrayXd& u = state.u.values();
  const ArrayXd& v = state.v.values();
  if (!u.allFinite() || !v.allFinite()) throw std::invalid_argument("stable_dt needs a finite state");
  const Grid& grid = state.u.grid();
  const double h = grid.min_spacing();
  const double gamma_max = params.motility.gamma(std::max(0.0, v.minCoeff()));
  const double u_max = std::max(0.0, u.maxCoeff());
  const double rate = 2.0 * grid.dim() * gamma_max / (h * h) + params.b * std::pow(u_max, params.sigma - 1.0);
  return std::min(config.cfl_safety / rate, config.dt_max);
}

ArrayXd Stepper::rhs(const ArrayXd& u, const ArrayXd& v) const {
  const ArrayXd w = params_.motility.gamma(v.max(0.0)) * u;
  return discrete_laplacian(grid(), w) + params_.a * u - params_.b * u.pow(params_.sigma);
}

SimState Stepper::finish(const SimState& prev, ArrayXd u_next, double dt) const {
  const double t = prev.t + dt;
  if (!u_next.allFinite()) throw BlowUpDetected(t, std::numeric_limits<double>::infinity());
  const double peak = u_next.abs().maxCoeff();
  if (peak > config_.blowup_threshold) throw BlowUpDetected(t, peak);
  ArrayXd v_next = solver_.solve(u_next);
  return SimState{t, ScalarField(grid(), std::move(u_next)), ScalarField(grid(), std::move(v_next)), dt};
}

SimState Stepper::step(const SimState& state, double dt, std::vector<StepEvent>* events) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step size must be positive");
  const ArrayXd& u = state.u.values();
  const ArrayXd k1 = rhs(u, state.v.values());

  if (config_.scheme == Scheme::ExplicitEuler) return finish(state, u + dt * k1, dt);

  ArrayXd u1 = u + dt * k1;
  if (!u1.allFinite() || u1.abs().maxCoeff() > config_.blowup_threshold) {
    throw BlowUpDetected(state.t + dt, u1.allFinite() ? u1.abs().maxCoeff() : std::numeric_limits<double>::infinity());
  }
  u1 = u1.max(0.0);
  const ArrayXd v1 = solver_.solve(u1);
  ArrayXd next = u + (dt / 2) * (k1 + rhs(u1, v1));

  double worst = 0.0;
  for (Index i = 0; i < next.size(); ++i) {
    if (next[i] < 0.0) {
      worst = std::min(worst, next[i]);
      next[i] = 0.0;
    }
  }
  if (worst < kHeunClampFloor && events != nullptr) {
    events->push_back({state.t + dt, "positivity violation clamped: min u = " + std::to_string(worst)});
  }
  return finish(state, std::move(next), dt);
}

SimState step(const SimState& state, const Parameters& params, const StepperConfig& config) {
  return Stepper(state.u.grid(), params, config).step(state);
}

RunSummary run(const ScalarField& u0, const Parameters& params, const StepperConfig& config,
               const RunOptions& options, const RunHooks& hooks) {
  if (!(options.t_end >= 0.0) || !std::isfinite(options.t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!(u0.values() >= 0.0).all()) throw std::invalid_argument("initial data must be nonnegative");
  if (!(u0.values() > 0.0).any()) throw std::invalid_argument("initial data must not vanish identically");

  const Stepper stepper(u0.grid(), params, config);
  const double t_end = options.t_end;
  const double snap = 1e-12 * std::max(1.0, t_end);

  struct Target {
    double t;
    bool observe;
    bool extra;
  };
  std::vector<Target> targets;
  if (options.observe_every > 0.0) {
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * options.observe_every;
      if (t >= t_end - snap) break;
      targets.push_back({t, true, false});
    }
  }
  bool extra_at_start = false;
  for (double t : options.extra_times) {
    if (t < 0.0 || t > t_end + snap) continue;
    if (t <= snap) {
      extra_at_start = true;
      continue;
    }
    targets.push_back({std::min(t, t_end), false, true});
  }
  targets.push_back({t_end, true, false});
  std::sort(targets.begin(), targets.end(), [](const Target& l, const Target& r) { return l.t < r.t; });
  std::vector<Target> merged;
  for (const Target& tg : targets) {
    if (!merged.empty() && tg.t - merged.back().t <= snap) {
      merged.back().observe |= tg.observe;
      merged.back().extra |= tg.extra;
      merged.back().t = std::max(merged.back().t, tg.t);
    } else {
      merged.push_back(tg);
    }
  }

  RunSummary summary;
  SimState state = stepper.make_state(u0, 0.0);
  if (hooks.on_observe) hooks.on_observe(state);
  if (extra_at_start && hooks.on_extra_time) hooks.on_extra_time(state);
  if (t_end == 0.0) {
    summary.final_state = std::move(state);
    return summary;
  }

  for (const Target& tg : merged) {
    while (tg.t - state.t > snap) {
      const double dt = std::min(stepper.stable_dt(state), tg.t - state.t);
      SimState next = stepper.step(state, dt, &summary.events);
      if (tg.t - next.t <= snap) next.t = tg.t;
      if (hooks.on_step) hooks.on_step(state, next);
      state = std::move(next);
      ++summary.steps;
    }
    if (tg.observe && hooks.on_observe) hooks.on_observe(state);
    if (tg.extra && hooks.on_extra_time) hooks.on_extra_time(state);
  }
  summary.final_state = std::move(state);
  return summary;
}

}  // namespace chemo
