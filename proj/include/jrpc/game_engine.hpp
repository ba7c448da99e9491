#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jrpc/core_model.hpp"
#include "jrpc/rate_quantizer.hpp"

namespace jrpc {

// How a best-response candidate outside the strategy box is brought back in.
//   clamp: project power and rate independently onto their boxes.
//   kkt:   pin the violated coordinate and re-optimize the other one.
enum class UpdatePolicy { clamp, kkt };

enum class ConvergenceMetric {
  relative,        // max_i |dp|/p + |dr|/r
  paper_absolute,  // max_i |dp| + |dr|, watts and bps summed as-is
};

struct ConvergenceConfig {
  double delta = 1e-9;
  int max_iterations = 500;
  ConvergenceMetric metric = ConvergenceMetric::relative;
};

enum class Schedule { synchronous, sequential };

struct SolverOptions {
  UpdatePolicy policy = UpdatePolicy::clamp;
  ConvergenceConfig convergence;
  Schedule schedule = Schedule::synchronous;
  // Re-select every user's base station each iteration (multi-cell game).
  bool reassign = false;
  std::optional<RateSet> rates;
  QuantizeMode quantize = QuantizeMode::every_iteration;
};

struct NetworkState {
  Vector power;
  Vector rate;
  std::vector<int> assignment;

  Strategy strategy(Eigen::Index i) const { return {power(i), rate(i)}; }
};

struct IterationRecord {
  int iteration = 0;
  Vector power;
  Vector rate;
  Vector sinr;
  Vector utility;
  std::vector<int> assignment;
  double metric = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations_used = 0;

  const IterationRecord& last() const { return records.back(); }
};

// A single-cell or multi-cell game instance.
struct Problem {
  ChannelModel channel;
  std::vector<UserParams> users;
  SolverOptions options;
};

// Without pricing every user transmits at full power and full rate.
std::vector<Strategy> njrpcg_equilibrium(std::span<const UserParams> users);

Strategy unconstrained_best_response(double r_eff, double alpha1, double alpha2, double lambda);

// Best power when the rate is pinned at `rate_bound`.
double power_update_rate_bounded(double r_eff, double rate_bound, double alpha1, double alpha2,
                                 double lambda);

// Best rate when the power is pinned at `power_bound`.
double rate_update_power_bounded(double r_eff, double power_bound, double alpha1, double alpha2,
                                 double lambda);

Strategy bounded_step(const UserParams& user, double r_eff, UpdatePolicy policy);

// Power component of one synchronous update for every user against a single
// receiver: I^p(p). With `clamp`, the result is projected onto each power box.
Vector power_map(const Vector& gains, std::span<const UserParams> users, double noise, const Vector& powers,
                 bool clamp);

// Closed-form equilibrium of M identical users at one distance.
Strategy symmetric_fixed_point(int users, double alpha_ratio, double lambda, double noise, double gain);

NetworkState initial_state(std::span<const UserParams> users, int station = 0);

// Synchronous or sequential best-response iteration. Owns its channel and user
// set so users can join mid-run.
class IterativeSolver {
 public:
  IterativeSolver(ChannelModel channel, std::vector<UserParams> users, SolverOptions options);
  IterativeSolver(ChannelModel channel, std::vector<UserParams> users, SolverOptions options,
                  NetworkState initial);

  const IterationRecord& step();

  // Steps until converged or the iteration budget is spent.
  const IterationTrace& run();

  // Adds a user at its initial strategy; `distances` has one entry per station.
  void add_user(const UserParams& user, const Vector& distances, int station = 0);

  bool converged() const { return trace_.converged; }
  int iterations() const { return trace_.iterations_used; }
  const NetworkState& state() const { return state_; }
  const ChannelModel& channel() const { return channel_; }
  const std::vector<UserParams>& users() const { return users_; }
  const IterationTrace& trace() const { return trace_; }

 private:
  IterationRecord snapshot(int iteration, double metric) const;
  void quantize_converged_rates();

  ChannelModel channel_;
  std::vector<UserParams> users_;
  SolverOptions options_;
  Matrix gains_;
  NetworkState state_;
  IterationTrace trace_;
};

IterationTrace iterate_to_convergence(const ChannelModel& channel, std::span<const UserParams> users,
                                      UpdatePolicy policy, const ConvergenceConfig& config,
                                      Schedule schedule = Schedule::synchronous);

IterationTrace iterate_to_convergence(const Problem& problem);
IterationTrace iterate_to_convergence(const Problem& problem, const NetworkState& initial);

// SINR and R_eff of every user at its assigned station for the given state.
Vector state_sinr(const ChannelModel& channel, const NetworkState& state);
Vector state_effective_interference(const ChannelModel& channel, const NetworkState& state);

}  // namespace jrpc
