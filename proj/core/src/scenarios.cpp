#include "novikov/scenarios.hpp"

namespace novikov::scenarios {

namespace {

const char* kSmallGaussian = R"(# Small Gaussian data with weak dissipation.
scenario.name = small_gaussian
scenario.provenance = constructed
grid.n_modes = 256
grid.half_length = 20
model.k = 1
model.lambda = 0.5
model.g_coeffs = 0, 0, 4/3
initial.kind = gaussian
initial.u_amplitude = 0.05
initial.rho_amplitude = 0.05
control.t_end = 2
control.dt_max = 0.01
weight.exp_half.a = 1/2
weight.exp_half.b = 1
weight.exp_half.theta = 1/2
weight.exp_half.p = 2
trajectories.count = 64
trajectories.span = 3
output.directory = small_gaussian
)";

const char* kSteep = R"(# Steep antisymmetric data; k u u_x is strongly negative at the origin.
scenario.name = steep
scenario.provenance = constructed
grid.n_modes = 2048
grid.half_length = 12
model.k = 1
model.lambda = 0
model.g_coeffs = 0, 0, 4/3
initial.kind = odd_gaussian
initial.u_amplitude = 1
initial.rho_amplitude = 0
control.t_end = 5
control.dt_max = 0.01
control.breaking_threshold = -3
output.directory = steep
)";

const char* kSmallDataControl = R"(# Same family and resolution as the steep run at amplitude 0.01.
scenario.name = small_data_control
scenario.provenance = constructed
grid.n_modes = 2048
grid.half_length = 12
model.k = 1
model.lambda = 0
model.g_coeffs = 0, 0, 4/3
initial.kind = odd_gaussian
initial.u_amplitude = 0.01
initial.rho_amplitude = 0
control.t_end = 5
control.dt_max = 0.01
control.breaking_threshold = -3
output.directory = small_data_control
)";

const char* kConvergence = R"(# Smooth Gaussian data for the time ladder and the refinement pair.
scenario.name = convergence
scenario.provenance = constructed
grid.n_modes = 256
grid.half_length = 20
model.k = 1
model.lambda = 0.5
model.g_coeffs = 0, 0, 4/3
initial.kind = gaussian
initial.u_amplitude = 0.2
initial.rho_amplitude = 0.2
control.t_end = 1
control.dt_max = 0.01
convergence.dt_coarse = 0.1
convergence.levels = 4
convergence.horizon = 1
convergence.spatial_n = 128
convergence.spatial_dt = 0.01
convergence.perturbation = 1e-6
output.directory = convergence
)";

const char* kZero = R"(# Zero data: every diagnostic stays zero.
scenario.name = zero
scenario.provenance = constructed
grid.n_modes = 64
grid.half_length = 10
model.k = 1
model.lambda = 0.5
model.g_coeffs = 0, 0, 4/3
initial.kind = gaussian
initial.u_amplitude = 0
initial.rho_amplitude = 0
control.t_end = 0.1
output.directory = zero
)";

}  // namespace

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = {
      {"small_gaussian", kSmallGaussian},
      {"steep", kSteep},
      {"small_data_control", kSmallDataControl},
      {"convergence", kConvergence},
      {"zero", kZero},
  };
  return list;
}

ScenarioConfig builtin(const std::string& name) {
  for (const auto& b : builtins()) {
    if (b.name == name) {
      return resolve_config(KeyValueDocument::parse(b.text, "builtin:" + name));
    }
  }
  throw UsageError("no built-in scenario named " + name);
}

}  // namespace novikov::scenarios
