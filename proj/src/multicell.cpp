#include "jrpc/multicell.hpp"

#include <algorithm>
#include <limits>

namespace jrpc {

int select_station(const Eigen::Ref<const Vector>& r_eff_by_station, int current) {
  if (r_eff_by_station.size() < 1) throw DomainError("select_station: no base stations");
  Eigen::Index best = 0;
  const double lowest = r_eff_by_station.minCoeff(&best);
  const double slack = kStationTieTolerance * lowest;
  if (current >= 0 && current < r_eff_by_station.size() && r_eff_by_station(current) <= lowest + slack)
    return current;
  for (Eigen::Index a = 0; a < r_eff_by_station.size(); ++a)
    if (r_eff_by_station(a) <= lowest + slack) return static_cast<int>(a);
  return static_cast<int>(best);
}

int assign_base_station(const ChannelModel& channel, const Vector& powers, int user, int current) {
  if (user < 0 || user >= channel.users()) throw DomainError("assign_base_station: invalid user");
  const Matrix gains = channel.gains();
  Vector column(gains.rows());
  for (Eigen::Index a = 0; a < gains.rows(); ++a)
    column(a) = effective_interference(gains.row(a).transpose(), powers, user, channel.noise_w);
  return select_station(column, current);
}

std::pair<Assignment, std::vector<Strategy>> multicell_step(const ChannelModel& channel,
                                                            std::span<const UserParams> users,
                                                            const NetworkState& state, UpdatePolicy policy) {
  const Matrix gains = channel.gains();
  const Matrix r_eff = effective_interference_matrix(gains, state.power, channel.noise_w);
  Assignment assignment(users.size());
  std::vector<Strategy> strategies(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const int a = select_station(r_eff.col(col), state.assignment[i]);
    assignment[i] = a;
    strategies[i] = bounded_step(users[i], r_eff(a, col), policy);
  }
  return {std::move(assignment), std::move(strategies)};
}

IterationTrace njrpcgpb_iterate(const ChannelModel& channel, std::span<const UserParams> users,
                                UpdatePolicy policy, const ConvergenceConfig& config,
                                const std::optional<Assignment>& initial) {
  SolverOptions options;
  options.policy = policy;
  options.convergence = config;
  options.reassign = true;
  NetworkState start = initial_state(users);
  if (initial) {
    if (initial->size() != users.size()) throw DomainError("njrpcgpb_iterate: initial assignment size mismatch");
    start.assignment = *initial;
  }
  IterativeSolver solver(channel, {users.begin(), users.end()}, options, std::move(start));
  return solver.run();
}

Vector multicell_power_map(const Matrix& gains, std::span<const UserParams> users, double noise,
                           const Vector& powers, bool clamp) {
  Vector out(powers.size());
  for (Eigen::Index i = 0; i < powers.size(); ++i) {
    const auto& u = users[static_cast<std::size_t>(i)];
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < gains.rows(); ++a) {
      const double r_eff = effective_interference(gains.row(a).transpose(), powers, i, noise);
      best = std::min(best, unconstrained_best_response(r_eff, u.alpha1, u.alpha2, u.lambda).power);
    }
    out(i) = clamp ? std::clamp(best, u.p_min, u.p_max) : best;
  }
  return out;
}

}  // namespace jrpc
