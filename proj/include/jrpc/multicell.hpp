#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jrpc/game_engine.hpp"

namespace jrpc {

using Assignment = std::vector<int>;

// Relative slack under which two effective interferences count as equal.
inline constexpr double kStationTieTolerance = 1e-9;

// argmin over stations of the given R_eff column. `current` is kept when it
// attains the minimum; otherwise the lowest minimizing index wins.
int select_station(const Eigen::Ref<const Vector>& r_eff_by_station, int current);

int assign_base_station(const ChannelModel& channel, const Vector& powers, int user, int current);

// One synchronous multi-cell iteration: reassign every user, then update
// against the effective interference at the chosen station.
std::pair<Assignment, std::vector<Strategy>> multicell_step(const ChannelModel& channel,
                                                            std::span<const UserParams> users,
                                                            const NetworkState& state,
                                                            UpdatePolicy policy);

IterationTrace njrpcgpb_iterate(const ChannelModel& channel, std::span<const UserParams> users,
                                UpdatePolicy policy, const ConvergenceConfig& config,
                                const std::optional<Assignment>& initial = std::nullopt);

// min over stations of the per-station power update; optionally box-clamped.
Vector multicell_power_map(const Matrix& gains, std::span<const UserParams> users, double noise,
                           const Vector& powers, bool clamp);

}  // namespace jrpc
