#include "chemo/scenario.hpp"

#include "chemo/diagnostics.hpp"
#include "chemo/snapshot.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace chemo {

namespace {

std::string snapshot_path(const std::string& prefix, double t) {
  std::ostringstream os;
  os << prefix << std::setprecision(10) << t << ".csv";
  return os.str();
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

double xi_for(const Grid& grid, double sigma) {
  const PoincareEstimate est = estimate_poincare(grid, compute_q(sigma));
  return est.eigen_xi.value_or(est.xi);
}

struct Outcome {
  std::vector<DiagnosticsRow> rows;
  SimState final_state;
  bool blowup = false;
  double blowup_t = 0.0;
  std::vector<StepEvent> events;
};

Outcome simulate(const ScenarioConfig& config, const ScalarField& u0, const RunHooks& extra = {}) {
  DiagnosticsRecorder recorder(DiagnosticsContext::make(u0, config.params));
  RunHooks hooks = extra;
  hooks.on_observe = [&](const SimState& s) { recorder.observe(s); };
  RunOptions options{config.t_end, config.observe_every, config.snapshot_times};
  Outcome out;
  try {
    RunSummary summary = run(u0, config.params, config.stepper, options, hooks);
    out.final_state = std::move(summary.final_state);
    out.events = std::move(summary.events);
  } catch (const BlowUpDetected& e) {
    out.blowup = true;
    out.blowup_t = e.time();
  }
  out.rows = recorder.rows();
  return out;
}

}  // namespace

std::string regime_line(int n, const Parameters& params, const ConstantsReport& report) {
  const Regime regime = classify_regime(n, params, report);
  switch (regime.kind) {
    case RegimeKind::Converges:
      return "Converges case (" + std::to_string(*regime.convergence_case) + "): " + regime.reason;
    case RegimeKind::GlobalBounded:
      return "GlobalBounded case (" + std::to_string(*regime.bounded_case) + "): " + regime.reason;
    case RegimeKind::Unclassified:
      break;
  }
  return "Unclassified: " + regime.reason;
}

int cmd_run(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const ScalarField u0 = make_initial(config);
    RunHooks hooks;
    std::vector<std::string> written;
    hooks.on_extra_time = [&](const SimState& s) {
      const std::string path = snapshot_path(config.snapshot_prefix, s.t);
      ensure_parent(path);
      write_snapshot(path, s.u, s.v);
      written.push_back(path);
    };
    const Outcome result = simulate(config, u0, hooks);

    ensure_parent(config.diagnostics_path);
    std::ofstream csv(config.diagnostics_path);
    if (!csv) throw std::runtime_error("cannot write diagnostics '" + config.diagnostics_path + "'");
    write_diagnostics_csv(csv, result.rows);
    if (!csv) throw std::runtime_error("write failed for '" + config.diagnostics_path + "'");

    for (const StepEvent& e : result.events) err << "warning: t=" << e.t << ": " << e.what << '\n';
    out << "diagnostics: " << config.diagnostics_path << " (" << result.rows.size() << " rows)\n";
    for (const std::string& p : written) out << "snapshot: " << p << '\n';
    if (result.blowup) {
      err << "blow-up detected at t=" << result.blowup_t << '\n';
      return kExitBlowUp;
    }
    const DiagnosticsRow& last = result.rows.back();
    out << std::setprecision(10) << "t=" << last.t << " dist_u=" << last.dist_u << " dist_v=" << last.dist_v
        << " lyapunov=" << last.lyapunov << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_constants(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const ScalarField u0 = make_initial(config);
    const ConstantsReport report = compute_constants(u0, config.params);
    out << to_text(report);
    out << regime_line(config.grid.dim(), config.params, report) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_sweep(const ScenarioConfig& config, const SweepSpec& sweep, std::ostream& out, std::ostream& err) {
  try {
    const std::string path = sweep.out_path.empty() ? config.sweep_path : sweep.out_path;
    if (path.empty()) throw ConfigError("no sweep output path: set [output] sweep or pass --out");
    if (sweep.count < 1) throw ConfigError("sweep count must be at least 1");
    if (!std::isfinite(sweep.lo) || !std::isfinite(sweep.hi)) throw ConfigError("sweep bounds must be finite");
    if (sweep.log_scale && !(sweep.lo > 0.0 && sweep.hi > 0.0)) throw ConfigError("log sweep needs positive bounds");
    const MotilityFamily family = config.params.motility.family();
    if (sweep.param == "chi" && family != MotilityFamily::Exponential) {
      throw ConfigError("--param chi needs the exponential motility family");
    }
    if (sweep.param == "k" && family != MotilityFamily::AlgebraicOffset) {
      throw ConfigError("--param k needs the algebraic motility family");
    }
    if (sweep.param != "a" && sweep.param != "b" && sweep.param != "sigma" && sweep.param != "chi" &&
        sweep.param != "k") {
      throw ConfigError("sweep parameter must be one of a, b, sigma, chi, k");
    }

    const ScalarField u0 = make_initial(config);
    const double omega = config.grid.measure();
    std::map<double, double> xi_cache;

    ensure_parent(path);
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write sweep '" + path + "'");
    csv << "index,param,value,b2,final_t,final_dist_u,lyapunov_monotone,blowup\n" << std::setprecision(17);

    for (int i = 0; i < sweep.count; ++i) {
      const double s = sweep.count == 1 ? 0.0 : static_cast<double>(i) / (sweep.count - 1);
      const double value = sweep.log_scale ? std::exp(std::log(sweep.lo) + s * (std::log(sweep.hi) - std::log(sweep.lo)))
                                           : sweep.lo + s * (sweep.hi - sweep.lo);
      ScenarioConfig point = config;
      Parameters& p = point.params;
      if (sweep.param == "a") {
        p.a = value;
      } else if (sweep.param == "b") {
        p.b = value;
      } else if (sweep.param == "sigma") {
        p.sigma = value;
      } else if (sweep.param == "chi") {
        p.motility = Motility::exponential(value);
      } else {
        const auto& alg = std::get<AlgebraicOffsetMotility>(config.params.motility.spec());
        p.motility = Motility::algebraic_offset(value, alg.c);
      }
      p.validate();
      point.snapshot_times.clear();

      if (!xi_cache.count(p.sigma)) xi_cache[p.sigma] = p.sigma < 2.0 ? xi_for(point.grid, p.sigma) : 1.0;
      const double b2 = compute_b2(p.a, p.sigma, p.motility, compute_K1(p.sigma, omega),
                                   compute_K2(p.sigma, xi_cache[p.sigma]));

      const Outcome result = simulate(point, u0);
      const DiagnosticsRow& last = result.rows.back();
      bool monotone = false;
      if (!result.blowup) {
        const DiagnosticsContext ctx = DiagnosticsContext::make(u0, p);
        const auto t_star = detect_Tstar(result.rows, 2.0, ctx.envelope());
        monotone = t_star.has_value() && lyapunov_decay_check(result.rows, *t_star).monotone;
      }
      csv << i << ',' << sweep.param << ',' << value << ',' << b2 << ','
          << (result.blowup ? result.blowup_t : last.t) << ',' << last.dist_u << ',' << int(monotone) << ','
          << int(result.blowup) << '\n';
      out << "point " << i << ": " << sweep.param << '=' << value << (result.blowup ? " blow-up" : "") << '\n';
    }
    if (!csv) throw std::runtime_error("write failed for '" + path + "'");
    out << "sweep: " << path << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_estimate_constant(const ScenarioConfig& config, const std::string& which, std::ostream& out,
                          std::ostream& err) {
  try {
    if (which != "xi" && which != "G" && which != "R") throw ConfigError("--which must be xi, G or R");
    const ScalarField u0 = make_initial(config);
    double estimate = 0.0;
    int starts = 0;
    ScalarField extremal;
    std::string note;
    if (which == "xi") {
      const PoincareEstimate est = estimate_poincare(config.grid, compute_q(config.params.sigma));
      estimate = est.xi;
      starts = est.starts;
      extremal = est.extremal;
      if (est.eigen_xi) {
        std::ostringstream os;
        os << std::setprecision(17) << "eigen_xi=" << *est.eigen_xi << '\n';
        note = os.str();
      }
    } else {
      const KappaEstimate est = estimate_kappa_b1(u0, config.params, config.grid);
      estimate = which == "G" ? est.G : est.R;
      starts = est.fields_tested;
      extremal = which == "G" ? est.G_extremal : est.R_extremal;
    }
    const auto dir = std::filesystem::path(config.diagnostics_path).parent_path();
    const std::string path = (dir / ("extremal_" + which + ".csv")).string();
    ensure_parent(path);
    write_snapshot(path, extremal, solve_helmholtz(extremal));
    out << std::setprecision(17) << which << '=' << estimate << '\n' << note << "starts=" << starts << '\n'
        << "extremal=" << path << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace chemo
