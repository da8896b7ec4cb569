#include "novikov/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace novikov {

namespace {

double wrap(double x, double L) {
  const double period = 2.0 * L;
  double s = std::fmod(x + L, period);
  if (s < 0.0) s += period;
  return s - L;
}

struct PathRates {
  std::vector<double> dq;
  std::vector<double> u_ux;
};

PathRates path_rates(const FieldPair& field, const ModelParams& params,
                     const std::vector<double>& q) {
  const FourierInterpolant u(field.u);
  const double L = field.grid().half_length();
  PathRates r{std::vector<double>(q.size()), std::vector<double>(q.size())};
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto [value, slope] = u.value_and_slope(wrap(q[i], L));
    r.dq[i] = params.k * value * value;
    r.u_ux[i] = value * slope;
    if (!std::isfinite(r.dq[i]) || !std::isfinite(r.u_ux[i])) {
      throw CorruptStateError("trajectory interpolation", "non-finite u or u_x on a path");
    }
  }
  return r;
}

}  // namespace

TrajectorySet TrajectorySet::uniform(std::size_t count, double span) {
  std::vector<double> labels(count);
  if (count == 1) {
    labels[0] = 0.0;
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      labels[i] = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(count - 1);
    }
  }
  return from_labels(std::move(labels));
}

TrajectorySet TrajectorySet::from_labels(std::vector<double> labels) {
  TrajectorySet ts;
  ts.positions = labels;
  ts.jacobian_log.assign(labels.size(), 0.0);
  ts.transport_log.assign(labels.size(), 0.0);
  ts.labels = std::move(labels);
  return ts;
}

std::vector<double> TrajectorySet::wrapped_positions(double half_length) const {
  std::vector<double> out(positions.size());
  std::transform(positions.begin(), positions.end(), out.begin(),
                 [&](double q) { return wrap(q, half_length); });
  return out;
}

bool TrajectorySet::positions_increasing() const noexcept {
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] > positions[i - 1])) return false;
  }
  return true;
}

TrajectorySet advance_trajectories(const TrajectorySet& ts, const StageStates& stages,
                                   const ModelParams& params, double dt) {
  const std::size_t n = ts.size();
  const double k = params.k;
  std::vector<double> q(ts.positions);
  std::array<PathRates, 4> rates;
  static constexpr double kStageOffset[4] = {0.0, 0.5, 0.5, 1.0};
  for (int s = 0; s < 4; ++s) {
    if (s > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = ts.positions[i] + kStageOffset[s] * dt * rates[s - 1].dq[i];
      }
    }
    rates[s] = path_rates(stages[s], params, q);
  }

  TrajectorySet out = ts;
  static constexpr double kWeight[4] = {1.0, 2.0, 2.0, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    double dq = 0.0, uux = 0.0;
    for (int s = 0; s < 4; ++s) {
      dq += kWeight[s] * rates[s].dq[i];
      uux += kWeight[s] * rates[s].u_ux[i];
    }
    out.positions[i] += dt / 6.0 * dq;
    out.jacobian_log[i] += 2.0 * k * dt / 6.0 * uux;
    out.transport_log[i] -= k * dt / 6.0 * uux;
  }
  return out;
}

TrajectorySet advance_trajectories(const TrajectorySet& ts, const FieldPair& state,
                                   const ModelParams& params, double dt) {
  return advance_trajectories(ts, step_with_stages(params, state, dt).stages, params, dt);
}

JacobianReport verify_jacobian(const TrajectorySet& ts) {
  const std::size_t n = ts.size();
  if (n < 3) throw UsageError("verify_jacobian needs at least three trajectories");
  JacobianReport r;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(ts.labels[i] > ts.labels[i - 1])) {
      throw UsageError("verify_jacobian needs strictly increasing labels");
    }
    if (!(ts.positions[i] > ts.positions[i - 1])) {
      r.positive = false;
      r.diffeomorphism_violation = true;
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double fd = (ts.positions[i + 1] - ts.positions[i - 1]) /
                      (ts.labels[i + 1] - ts.labels[i - 1]);
    const double exact = std::exp(ts.jacobian_log[i]);
    const double rel = std::abs(fd - exact) / exact;
    if (!(rel <= r.max_rel_discrepancy)) {
      r.max_rel_discrepancy = rel;
      r.worst_index = i;
    }
  }
  return r;
}

TransportReport verify_transport(const TrajectorySet& ts, const SpectralField& rho,
                                 const SpectralField& rho0) {
  const FourierInterpolant now(rho);
  const FourierInterpolant initial(rho0);
  const double L = rho.grid().half_length();
  const std::size_t n = ts.size();
  std::vector<double> r_now(n), r_init(n);
  double scale = 0.0;
  TransportReport r;
  for (std::size_t i = 0; i < n; ++i) {
    r_now[i] = now(wrap(ts.positions[i], L));
    r_init[i] = initial(wrap(ts.labels[i], L));
    scale = std::max(scale, std::abs(r_init[i]));
    r.max_abs_rho_on_paths = std::max(r.max_abs_rho_on_paths, std::abs(r_now[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double transported = r_now[i] * std::exp(-ts.transport_log[i]);
    const double squared = r_now[i] * r_now[i] * std::exp(ts.jacobian_log[i]);
    if (scale > 0.0) {
      r.transport_rel_error =
          std::max(r.transport_rel_error, std::abs(transported - r_init[i]) / scale);
      r.squared_rel_error =
          std::max(r.squared_rel_error, std::abs(squared - r_init[i] * r_init[i]) / (scale * scale));
    } else {
      r.transport_rel_error = std::max(r.transport_rel_error, std::abs(transported));
      r.squared_rel_error = std::max(r.squared_rel_error, std::abs(squared));
    }
  }
  return r;
}

std::string to_csv(const TrajectorySet& ts) {
  std::string out = "label,q,jacobian_log,transport_log\n";
  char buf[128];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", ts.labels[i], ts.positions[i],
                  ts.jacobian_log[i], ts.transport_log[i]);
    out += buf;
  }
  return out;
}

TrajectoryTracker::TrajectoryTracker(TrajectorySet initial, ModelParams params)
    : ts_(std::move(initial)), params_(std::move(params)) {
  monotone_ = ts_.positions_increasing();
}

void TrajectoryTracker::operator()(const FieldPair& /*state*/, const StepInfo& info) {
  if (info.stages == nullptr) return;
  ts_ = advance_trajectories(ts_, *info.stages, params_, info.dt);
  if (monotone_ && !ts_.positions_increasing()) {
    monotone_ = false;
    first_violation_ = info.index;
  }
}

}  // namespace novikov
