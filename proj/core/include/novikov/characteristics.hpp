#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "novikov/integrator.hpp"
#include "novikov/model.hpp"

namespace novikov {

/// Particle paths dq/dt = k u^2(t, q), q(0) = label, with the accumulated
/// logs along each path:
///   jacobian_log  = int_0^t 2k u u_x(tau, q) dtau   (log q_x)
///   transport_log = -k int_0^t u u_x(tau, q) dtau   (log rho(t, q) / rho_0)
///
/// Positions are kept unwrapped so that label order is observable; off-grid
/// values are taken at the periodic image inside [-L, L).
struct TrajectorySet {
  std::vector<double> labels;
  std::vector<double> positions;
  std::vector<double> jacobian_log;
  std::vector<double> transport_log;

  /// `count` labels evenly spaced on [-span, span].
  static TrajectorySet uniform(std::size_t count, double span);
  static TrajectorySet from_labels(std::vector<double> labels);

  std::size_t size() const noexcept { return labels.size(); }
  /// Positions folded into [-L, L).
  std::vector<double> wrapped_positions(double half_length) const;
  bool positions_increasing() const noexcept;
};

/// One RK4 step of the paths, using the PDE's own stage states as the frozen
/// field of each stage (lockstep with the integrator).
TrajectorySet advance_trajectories(const TrajectorySet& ts, const StageStates& stages,
                                   const ModelParams& params, double dt);

/// Convenience form: recomputes the PDE stages from `state`.
TrajectorySet advance_trajectories(const TrajectorySet& ts, const FieldPair& state,
                                   const ModelParams& params, double dt);

struct JacobianReport {
  double max_rel_discrepancy = 0.0;  // |dq/dx (finite difference) - e^{jacobian_log}| / e^{jacobian_log}
  bool positive = true;              // all finite-difference slopes > 0
  bool diffeomorphism_violation = false;
  std::size_t worst_index = 0;
};

/// Needs at least three trajectories with distinct labels.
JacobianReport verify_jacobian(const TrajectorySet& ts);

struct TransportReport {
  /// max |rho(t,q) e^{-transport_log} - rho_0(x)| / max |rho_0|
  double transport_rel_error = 0.0;
  /// max |rho(t,q)^2 e^{jacobian_log} - rho_0(x)^2| / max rho_0^2
  double squared_rel_error = 0.0;
  /// max over paths of |rho(t, q)|
  double max_abs_rho_on_paths = 0.0;
};

TransportReport verify_transport(const TrajectorySet& ts, const SpectralField& rho,
                                 const SpectralField& rho0);

/// CSV with header `label,q,jacobian_log,transport_log`.
std::string to_csv(const TrajectorySet& ts);

/// Observer adapter: advances a TrajectorySet alongside a run and records
/// whether label order was preserved at every step.
class TrajectoryTracker {
 public:
  TrajectoryTracker(TrajectorySet initial, ModelParams params);

  void operator()(const FieldPair& state, const StepInfo& info);

  const TrajectorySet& trajectories() const noexcept { return ts_; }
  bool monotone_throughout() const noexcept { return monotone_; }
  std::size_t first_violation_step() const noexcept { return first_violation_; }

 private:
  TrajectorySet ts_;
  ModelParams params_;
  bool monotone_ = true;
  std::size_t first_violation_ = 0;
};

}  // namespace novikov
