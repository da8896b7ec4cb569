#include "novikov/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "novikov/diagnostics.hpp"

namespace novikov {

void StepControl::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw UsageError("control.cfl must lie in (0, 1]");
  if (!(dt_min > 0.0)) throw UsageError("control.dt_min must be positive");
  if (!(dt_max > 0.0)) throw UsageError("control.dt_max must be positive");
  if (!(dt_min < dt_max)) throw UsageError("control.dt_min must be below control.dt_max");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw UsageError("control.t_end must be finite and >= 0");
  }
  if (!(breaking_threshold < 0.0)) {
    throw UsageError("control.breaking_threshold must be negative");
  }
}

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::breaking_detected:
      return "breaking_detected";
    case RunStatus::corrupt_state:
      return "corrupt_state";
  }
  return "unknown";
}

namespace {

FieldPair add_scaled(const FieldPair& base, double s, const Tendency& k, double time) {
  FieldPair out = base;
  out.u.axpy(s, k.du_dt);
  out.rho.axpy(s, k.drho_dt);
  out.time = time;
  return out;
}

Tendency stage_rhs(const ModelParams& params, const FieldPair& y, const Forcing& forcing,
                   int stage) {
  try {
    auto k = rhs(params, y);
    if (forcing) {
      const auto s = forcing(y.time);
      k.du_dt += s.du_dt;
      k.drho_dt += s.drho_dt;
    }
    return k;
  } catch (const CorruptStateError& e) {
    std::ostringstream term;
    term << e.term() << " (RK4 stage " << stage << ")";
    throw CorruptStateError(term.str(), e.what());
  }
}

}  // namespace

StepResult step_with_stages(const ModelParams& params, const FieldPair& state, double dt,
                            const Forcing& forcing) {
  if (!(dt > 0.0)) throw UsageError("step: dt must be positive");
  const double t = state.time;
  StepResult out{state, {state, state, state, state}};

  const auto k1 = stage_rhs(params, state, forcing, 1);
  out.stages[1] = add_scaled(state, 0.5 * dt, k1, t + 0.5 * dt);
  const auto k2 = stage_rhs(params, out.stages[1], forcing, 2);
  out.stages[2] = add_scaled(state, 0.5 * dt, k2, t + 0.5 * dt);
  const auto k3 = stage_rhs(params, out.stages[2], forcing, 3);
  out.stages[3] = add_scaled(state, dt, k3, t + dt);
  const auto k4 = stage_rhs(params, out.stages[3], forcing, 4);

  const double w = dt / 6.0;
  for (const auto& [kk, c] : {std::pair{&k1, 1.0}, {&k2, 2.0}, {&k3, 2.0}, {&k4, 1.0}}) {
    out.state.u.axpy(w * c, kk->du_dt);
    out.state.rho.axpy(w * c, kk->drho_dt);
  }
  out.state.time = t + dt;
  return out;
}

FieldPair step(const ModelParams& params, const FieldPair& state, double dt,
               const Forcing& forcing) {
  return step_with_stages(params, state, dt, forcing).state;
}

double cfl_timestep(const ModelParams& params, const FieldPair& state, const StepControl& ctrl) {
  double speed = 0.0;
  for (double u : state.u.values()) speed = std::max(speed, std::abs(params.k) * u * u);
  return std::min(ctrl.dt_max, ctrl.cfl * state.grid().spacing() / (speed + 1e-12));
}

RunOutcome run(const ModelParams& params, const FieldPair& init, const StepControl& ctrl,
               std::span<const Observer> observers) {
  params.validate();
  ctrl.validate();

  RunOutcome out{RunStatus::completed, init, init.time, "", 0};
  if (!init.is_finite()) {
    out.status = RunStatus::corrupt_state;
    out.halt_reason = "initial data not finite";
    return out;
  }

  auto notify = [&](const FieldPair& s, const StepInfo& info) {
    for (const auto& obs : observers) obs(s, info);
  };
  notify(init, StepInfo{});

  FieldPair state = init;
  for (;;) {
    const double monitor = breaking_monitor(params, state);
    if (monitor < ctrl.breaking_threshold) {
      std::ostringstream why;
      why.precision(17);
      why << "min k u u_x = " << monitor << " below threshold " << ctrl.breaking_threshold;
      out.status = RunStatus::breaking_detected;
      out.halt_reason = why.str();
      break;
    }
    const double remaining = ctrl.t_end - state.time;
    if (remaining <= ctrl.dt_min) {
      out.status = RunStatus::completed;
      out.halt_reason = "reached t_end";
      break;
    }
    double dt = cfl_timestep(params, state, ctrl);
    if (dt < ctrl.dt_min) {
      std::ostringstream why;
      why.precision(17);
      why << "timestep collapse: dt = " << dt << " below dt_min " << ctrl.dt_min;
      out.status = RunStatus::breaking_detected;
      out.halt_reason = why.str();
      break;
    }
    dt = std::min(dt, remaining);

    try {
      auto result = step_with_stages(params, state, dt);
      if (!result.state.is_finite()) throw CorruptStateError("state", "non-finite after step");
      state = std::move(result.state);
      ++out.steps;
      notify(state, StepInfo{out.steps, dt, &result.stages});
    } catch (const CorruptStateError& e) {
      out.status = RunStatus::corrupt_state;
      out.halt_reason = e.what();
      break;
    }
  }
  out.halt_time = state.time;
  out.final_state = std::move(state);
  return out;
}

}  // namespace novikov
