#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "jrpc/game_engine.hpp"

namespace jrpc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PricingRule {
  enum class Kind {
    constant,              // c
    per_user_count,        // c M
    direct_gain,           // c g_i
    inverse_gain,          // c / g_i
    target_ratio,          // c alpha2 / alpha1
    inverse_target_ratio,  // c alpha1 / alpha2
  };
  Kind kind = Kind::constant;
  double c = 1e-4;
  double dc = 2.5e-5;

  bool gain_dependent() const { return kind == Kind::direct_gain || kind == Kind::inverse_gain; }
};

std::string_view to_string(PricingRule::Kind kind);
PricingRule::Kind pricing_kind_from_string(std::string_view name);

double pricing_rule_eval(const PricingRule& rule, int users, double gain, double alpha1, double alpha2,
                         bool multicell = false);

// Writes the rule's lambda into every user of `problem` (gain taken at station 0).
void apply_pricing(Problem& problem, const PricingRule& rule);

enum class UserOutcome { below_target, at_target, above_target };

std::string_view to_string(UserOutcome outcome);

inline constexpr double kAtTargetTolerance = 1e-3;

std::vector<double> target_sinrs(std::span<const UserParams> users, double bandwidth);

std::vector<UserOutcome> classify_users(const IterationTrace& trace, std::span<const double> targets,
                                        double tolerance = kAtTargetTolerance);

struct EscalationResult {
  double c_final = 0.0;
  bool achieved = false;
  std::vector<double> tested;
  IterationTrace trace;
};

// Raises the pricing coefficient c0, c0 + dc, ... until no user is below target.
EscalationResult escalate_pricing(const Problem& problem, PricingRule rule, double c0, double dc, int max_steps,
                                  double tolerance = kAtTargetTolerance);

struct RemovalRound {
  std::vector<int> remaining;  // original user indices
  IterationTrace trace;
};

struct RemovalResult {
  std::vector<int> removed;  // original indices, in removal order
  std::vector<int> remaining;
  std::vector<RemovalRound> rounds;
  bool empty_network = false;

  const IterationTrace& final_trace() const { return rounds.back().trace; }
};

// Drops the worst below-target user (lowest achieved/target SINR) and re-solves
// until nobody is below target.
RemovalResult removal_loop(const Problem& problem, double tolerance = kAtTargetTolerance);

Problem subset(const Problem& problem, std::span<const int> keep);

}  // namespace jrpc
