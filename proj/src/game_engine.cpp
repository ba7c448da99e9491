#include "jrpc/game_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jrpc/multicell.hpp"

namespace jrpc {

namespace {

constexpr double kMetricFloor = 1e-30;

// Positive root of a x^2 + b x - c = 0 with a, c > 0, b >= 0, computed without
// cancellation.
double positive_root(double a, double b, double c) {
  return 2.0 * c / (b + std::sqrt(b * b + 4.0 * a * c));
}

bool outside(double x, double lo, double hi) { return x < lo || x > hi; }

double change_metric(const NetworkState& before, const NetworkState& after, ConvergenceMetric metric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < after.power.size(); ++i) {
    const double dp = std::abs(after.power(i) - before.power(i));
    const double dr = std::abs(after.rate(i) - before.rate(i));
    const double m = metric == ConvergenceMetric::relative
                         ? dp / std::max(after.power(i), kMetricFloor) + dr / std::max(after.rate(i), kMetricFloor)
                         : dp + dr;
    worst = std::max(worst, m);
  }
  return worst;
}

}  // namespace

std::vector<Strategy> njrpcg_equilibrium(std::span<const UserParams> users) {
  std::vector<Strategy> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back({u.p_max, u.r_max});
  return out;
}

Strategy unconstrained_best_response(double r_eff, double alpha1, double alpha2, double lambda) {
  if (!(r_eff > 0.0)) throw DomainError("best response: effective interference must be positive");
  if (!(alpha1 > 0.0 && alpha2 > 0.0 && lambda > 0.0))
    throw DomainError("best response: alpha1, alpha2, lambda must be positive");
  const double ratio = alpha2 / alpha1;
  return {std::sqrt(0.5 * ratio * r_eff / lambda), std::sqrt(0.5 / ratio / (lambda * r_eff))};
}

double power_update_rate_bounded(double r_eff, double rate_bound, double alpha1, double alpha2,
                                 double lambda) {
  // alpha1 lambda p^2 + alpha2 lambda R r_b p - alpha2 R = 0
  return positive_root(alpha1 * lambda, alpha2 * lambda * r_eff * rate_bound, alpha2 * r_eff);
}

double rate_update_power_bounded(double r_eff, double power_bound, double alpha1, double alpha2,
                                 double lambda) {
  // alpha2 lambda R r^2 + alpha1 lambda p_b r - alpha1 = 0
  return positive_root(alpha2 * lambda * r_eff, alpha1 * lambda * power_bound, alpha1);
}

Strategy bounded_step(const UserParams& u, double r_eff, UpdatePolicy policy) {
  const Strategy cand = unconstrained_best_response(r_eff, u.alpha1, u.alpha2, u.lambda);
  Strategy out{std::clamp(cand.power, u.p_min, u.p_max), std::clamp(cand.rate, u.r_min, u.r_max)};
  if (policy == UpdatePolicy::clamp) return out;

  const bool p_out = outside(cand.power, u.p_min, u.p_max);
  const bool r_out = outside(cand.rate, u.r_min, u.r_max);
  if (r_out && !p_out) {
    out.power = std::clamp(power_update_rate_bounded(r_eff, out.rate, u.alpha1, u.alpha2, u.lambda), u.p_min,
                           u.p_max);
  } else if (p_out && !r_out) {
    out.rate = std::clamp(rate_update_power_bounded(r_eff, out.power, u.alpha1, u.alpha2, u.lambda), u.r_min,
                          u.r_max);
  }
  return out;
}

Vector power_map(const Vector& gains, std::span<const UserParams> users, double noise, const Vector& powers,
                 bool clamp) {
  Vector out(powers.size());
  for (Eigen::Index i = 0; i < powers.size(); ++i) {
    const auto& u = users[static_cast<std::size_t>(i)];
    const double r_eff = effective_interference(gains, powers, i, noise);
    const double p = unconstrained_best_response(r_eff, u.alpha1, u.alpha2, u.lambda).power;
    out(i) = clamp ? std::clamp(p, u.p_min, u.p_max) : p;
  }
  return out;
}

Strategy symmetric_fixed_point(int users, double alpha_ratio, double lambda, double noise, double gain) {
  if (users < 1) throw DomainError("symmetric_fixed_point: need at least one user");
  if (!(alpha_ratio > 0.0 && lambda > 0.0 && noise >= 0.0 && gain > 0.0))
    throw DomainError("symmetric_fixed_point: parameters must be positive");
  // p^2 = k ((M-1) p + N0/g) with k = rho / (2 lambda)
  const double k = alpha_ratio / (2.0 * lambda);
  const double b = k * (users - 1);
  const double c = k * noise / gain;
  const double p = (b + std::sqrt(b * b + 4.0 * c)) / 2.0;
  const double r_eff = (users - 1) * p + noise / gain;
  return {p, std::sqrt(0.5 / alpha_ratio / (lambda * r_eff))};
}

NetworkState initial_state(std::span<const UserParams> users, int station) {
  NetworkState s;
  const auto m = static_cast<Eigen::Index>(users.size());
  s.power.resize(m);
  s.rate.resize(m);
  s.assignment.assign(users.size(), station);
  for (Eigen::Index i = 0; i < m; ++i) {
    s.power(i) = users[static_cast<std::size_t>(i)].p_init;
    s.rate(i) = users[static_cast<std::size_t>(i)].r_init;
  }
  return s;
}

Vector state_effective_interference(const ChannelModel& channel, const NetworkState& state) {
  const Matrix gains = channel.gains();
  Vector r_eff(state.power.size());
  for (Eigen::Index i = 0; i < r_eff.size(); ++i) {
    const auto a = state.assignment[static_cast<std::size_t>(i)];
    r_eff(i) = effective_interference(gains.row(a).transpose(), state.power, i, channel.noise_w);
  }
  return r_eff;
}

Vector state_sinr(const ChannelModel& channel, const NetworkState& state) {
  const Vector r_eff = state_effective_interference(channel, state);
  Vector out(r_eff.size());
  for (Eigen::Index i = 0; i < r_eff.size(); ++i)
    out(i) = sinr(channel.bandwidth_hz, state.power(i), state.rate(i), r_eff(i));
  return out;
}

IterativeSolver::IterativeSolver(ChannelModel channel, std::vector<UserParams> users, SolverOptions options)
    : IterativeSolver(channel, users, std::move(options), initial_state(users)) {}

IterativeSolver::IterativeSolver(ChannelModel channel, std::vector<UserParams> users, SolverOptions options,
                                 NetworkState initial)
    : channel_(std::move(channel)),
      users_(std::move(users)),
      options_(std::move(options)),
      state_(std::move(initial)) {
  channel_.validate();
  if (users_.empty()) throw DomainError("solver: at least one user required");
  if (channel_.users() != static_cast<Eigen::Index>(users_.size()))
    throw DomainError("solver: channel and user list disagree on the number of users");
  if (state_.power.size() != channel_.users() || state_.rate.size() != channel_.users() ||
      state_.assignment.size() != users_.size())
    throw DomainError("solver: initial state has wrong dimensions");
  for (std::size_t i = 0; i < users_.size(); ++i) {
    users_[i].validate();
    const auto a = state_.assignment[i];
    if (a < 0 || a >= channel_.stations()) throw DomainError("solver: invalid initial base station");
  }
  if (!(options_.convergence.delta > 0.0) || options_.convergence.max_iterations < 1)
    throw DomainError("solver: need delta > 0 and max_iterations >= 1");
  gains_ = channel_.gains();
}

void IterativeSolver::add_user(const UserParams& user, const Vector& distances, int station) {
  user.validate();
  if (distances.size() != channel_.stations()) throw DomainError("add_user: one distance per station required");
  if (station < 0 || station >= channel_.stations()) throw DomainError("add_user: invalid base station");
  const auto m = channel_.users();
  channel_.distances_m.conservativeResize(m + 1, Eigen::NoChange);
  channel_.distances_m.row(m) = distances.transpose();
  channel_.validate();
  gains_ = channel_.gains();
  users_.push_back(user);
  state_.power.conservativeResize(m + 1);
  state_.rate.conservativeResize(m + 1);
  state_.power(m) = user.p_init;
  state_.rate(m) = user.r_init;
  state_.assignment.push_back(station);
  trace_.converged = false;
}

const IterationRecord& IterativeSolver::step() {
  const NetworkState before = state_;
  const auto m = static_cast<Eigen::Index>(users_.size());
  const double noise = channel_.noise_w;
  const bool quantize_now = options_.rates && options_.quantize == QuantizeMode::every_iteration;

  auto update_user = [&](Eigen::Index i, const Vector& powers) {
    const auto ui = static_cast<std::size_t>(i);
    int a = state_.assignment[ui];
    if (options_.reassign) {
      Vector column(gains_.rows());
      for (Eigen::Index s = 0; s < gains_.rows(); ++s)
        column(s) = effective_interference(gains_.row(s).transpose(), powers, i, noise);
      a = select_station(column, a);
    }
    const double r_eff = effective_interference(gains_.row(a).transpose(), powers, i, noise);
    Strategy s = bounded_step(users_[ui], r_eff, options_.policy);
    if (quantize_now) s.rate = quantize_down(s.rate, *options_.rates);
    state_.assignment[ui] = a;
    state_.power(i) = s.power;
    state_.rate(i) = s.rate;
  };

  if (options_.schedule == Schedule::synchronous) {
    for (Eigen::Index i = 0; i < m; ++i) update_user(i, before.power);
  } else {
    for (Eigen::Index i = 0; i < m; ++i) update_user(i, state_.power);
  }

  const double metric = change_metric(before, state_, options_.convergence.metric);
  ++trace_.iterations_used;
  trace_.converged = metric <= options_.convergence.delta;
  if (trace_.converged && options_.rates && options_.quantize == QuantizeMode::at_convergence)
    quantize_converged_rates();
  trace_.records.push_back(snapshot(trace_.iterations_used, metric));
  return trace_.records.back();
}

void IterativeSolver::quantize_converged_rates() {
  for (Eigen::Index i = 0; i < state_.rate.size(); ++i) state_.rate(i) = quantize_down(state_.rate(i), *options_.rates);
}

const IterationTrace& IterativeSolver::run() {
  while (!trace_.converged && trace_.iterations_used < options_.convergence.max_iterations) step();
  return trace_;
}

IterationRecord IterativeSolver::snapshot(int iteration, double metric) const {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.power = state_.power;
  rec.rate = state_.rate;
  rec.assignment = state_.assignment;
  rec.metric = metric;
  const auto m = state_.power.size();
  rec.sinr.resize(m);
  rec.utility.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& u = users_[static_cast<std::size_t>(i)];
    const int a = state_.assignment[static_cast<std::size_t>(i)];
    const double r_eff = effective_interference(gains_.row(a).transpose(), state_.power, i, channel_.noise_w);
    rec.sinr(i) = sinr(channel_.bandwidth_hz, state_.power(i), state_.rate(i), r_eff);
    rec.utility(i) = utility_priced(state_.power(i), state_.rate(i), r_eff, u.alpha1, u.alpha2, u.lambda);
  }
  return rec;
}

IterationTrace iterate_to_convergence(const ChannelModel& channel, std::span<const UserParams> users,
                                      UpdatePolicy policy, const ConvergenceConfig& config, Schedule schedule) {
  SolverOptions options;
  options.policy = policy;
  options.convergence = config;
  options.schedule = schedule;
  IterativeSolver solver(channel, {users.begin(), users.end()}, options);
  return solver.run();
}

IterationTrace iterate_to_convergence(const Problem& problem) {
  IterativeSolver solver(problem.channel, problem.users, problem.options);
  return solver.run();
}

IterationTrace iterate_to_convergence(const Problem& problem, const NetworkState& initial) {
  IterativeSolver solver(problem.channel, problem.users, problem.options, initial);
  return solver.run();
}

}  // namespace jrpc
