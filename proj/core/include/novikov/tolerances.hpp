#pragma once

// Pass/fail limits shared by the verify suite and the run manifest.
namespace novikov::limits {

inline constexpr double kEnergyLaw = 1e-6;         // |E(t) e^{2 lambda t} / E(0) - 1|
inline constexpr double kRhoMass = 1e-8;           // |R2(t) / R2(0) - 1|
inline constexpr double kGreenEquivalence = 1e-12;  // multiplier vs kernel form of the rhs
inline constexpr double kHelmholtzEigen = 1e-13;
inline constexpr double kOrderLow = 3.7;
inline constexpr double kOrderHigh = 4.3;
inline constexpr double kSpatialDrop = 1e3;
inline constexpr double kJacobian = 1e-4;
inline constexpr double kTransport = 1e-5;
inline constexpr double kTransportSquared = 1e-5;
inline constexpr double kPersistenceConstant = 10.0;
inline constexpr double kThetaLow = 0.45;
inline constexpr double kThetaHigh = 0.55;
inline constexpr double kDivergence = 1e-3;
inline constexpr double kSmallDataMonitor = -1.0;
inline constexpr double kVerifySeconds = 60.0;

}  // namespace novikov::limits
