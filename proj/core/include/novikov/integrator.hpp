#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "novikov/model.hpp"

namespace novikov {

struct StepControl {
  double cfl = 0.3;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  double t_end = 1.0;
  /// Halt with breaking_detected once min_x k u u_x drops below this.
  double breaking_threshold = -1e6;

  void validate() const;
};

enum class RunStatus { completed, breaking_detected, corrupt_state };

const char* to_string(RunStatus status) noexcept;

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  FieldPair final_state;
  double halt_time = 0.0;
  std::string halt_reason;
  std::size_t steps = 0;
};

/// Optional additive source term S(t) for manufactured-solution runs:
/// the evolved system is z_t = rhs(z) + S(t).
using Forcing = std::function<Tendency(double t)>;

/// The four RK4 stage states Y1..Y4 of one step (Y1 is the start state).
using StageStates = std::array<FieldPair, 4>;

struct StepResult {
  FieldPair state;
  StageStates stages;
};

/// One classical RK4 step. CorruptStateError from a stage is rethrown with
/// the stage index appended to the term.
FieldPair step(const ModelParams& params, const FieldPair& state, double dt,
               const Forcing& forcing = {});
StepResult step_with_stages(const ModelParams& params, const FieldPair& state, double dt,
                            const Forcing& forcing = {});

/// dt = min(dt_max, cfl * h / max_x(|k| u^2 + 1e-12)).
double cfl_timestep(const ModelParams& params, const FieldPair& state, const StepControl& ctrl);

struct StepInfo {
  std::size_t index = 0;   // 0 for the initial state
  double dt = 0.0;         // step that produced this state
  const StageStates* stages = nullptr;  // null for the initial state
};

/// Observers see every accepted state (including the initial one) in list
/// order, through a const reference.
using Observer = std::function<void(const FieldPair&, const StepInfo&)>;

/// Adaptive RK4 loop up to ctrl.t_end (absolute time). Never throws for
/// numerical failure: non-finite fields end the run with corrupt_state.
RunOutcome run(const ModelParams& params, const FieldPair& init, const StepControl& ctrl,
               std::span<const Observer> observers = {});

}  // namespace novikov
