#pragma once

// Parabolic rescaling u~ = u / Theta(t, c) with dt/ds = Theta^alpha.

#include "icf/flow.hpp"
#include "icf/gauge.hpp"

namespace icf {

/// Re-expresses every row of `traj` in the gauge `ctx` (s, tilde and
/// Theta-scaled columns). Snapshots keep the physical field.
Trajectory rescale_trajectory(const Trajectory& traj, const RescaleContext& ctx);

/// Integrates d u~/ds = v / (u~^alpha H~) - u~ / n directly in s, from
/// u0_tilde = u0 / Theta(0, c). params.t_end and snapshot_times are in s.
Trajectory run_rescaled_flow(const ScalarField& u0_tilde, const CapGrid& grid,
                             const FlowParams& params, const RescaleContext& ctx);

/// Rescaled field u / Theta(t, c) of a snapshot.
ScalarField rescaled_field(const Snapshot& snap, const RescaleContext& ctx);

}  // namespace icf
