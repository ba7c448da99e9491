#include "jrpc/admission.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace jrpc {

std::string_view to_string(PricingRule::Kind kind) {
  switch (kind) {
    case PricingRule::Kind::constant: return "constant";
    case PricingRule::Kind::per_user_count: return "per_user_count";
    case PricingRule::Kind::direct_gain: return "direct_gain";
    case PricingRule::Kind::inverse_gain: return "inverse_gain";
    case PricingRule::Kind::target_ratio: return "target_ratio";
    case PricingRule::Kind::inverse_target_ratio: return "inverse_target_ratio";
  }
  return "?";
}

PricingRule::Kind pricing_kind_from_string(std::string_view name) {
  for (auto k : {PricingRule::Kind::constant, PricingRule::Kind::per_user_count, PricingRule::Kind::direct_gain,
                 PricingRule::Kind::inverse_gain, PricingRule::Kind::target_ratio,
                 PricingRule::Kind::inverse_target_ratio})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown pricing rule '" + std::string(name) + "'");
}

double pricing_rule_eval(const PricingRule& rule, int users, double gain, double alpha1, double alpha2,
                         bool multicell) {
  if (!(rule.c > 0.0)) throw ConfigError("pricing: coefficient c must be positive");
  if (multicell && rule.gain_dependent())
    throw ConfigError("pricing: gain-dependent rules are not allowed with several base stations");
  switch (rule.kind) {
    case PricingRule::Kind::constant: return rule.c;
    case PricingRule::Kind::per_user_count: return rule.c * users;
    case PricingRule::Kind::direct_gain: return rule.c * gain;
    case PricingRule::Kind::inverse_gain: return rule.c / gain;
    case PricingRule::Kind::target_ratio: return rule.c * alpha2 / alpha1;
    case PricingRule::Kind::inverse_target_ratio: return rule.c * alpha1 / alpha2;
  }
  throw ConfigError("pricing: unknown rule");
}

void apply_pricing(Problem& problem, const PricingRule& rule) {
  const Matrix gains = problem.channel.gains();
  const bool multicell = problem.channel.stations() > 1;
  const int m = static_cast<int>(problem.users.size());
  for (int i = 0; i < m; ++i) {
    auto& u = problem.users[static_cast<std::size_t>(i)];
    u.lambda = pricing_rule_eval(rule, m, gains(0, i), u.alpha1, u.alpha2, multicell);
  }
}

std::string_view to_string(UserOutcome outcome) {
  switch (outcome) {
    case UserOutcome::below_target: return "below_target";
    case UserOutcome::at_target: return "at_target";
    case UserOutcome::above_target: return "above_target";
  }
  return "?";
}

std::vector<double> target_sinrs(std::span<const UserParams> users, double bandwidth) {
  std::vector<double> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back(target_sinr(u, bandwidth));
  return out;
}

std::vector<UserOutcome> classify_users(const IterationTrace& trace, std::span<const double> targets,
                                        double tolerance) {
  if (!trace.converged || trace.records.empty()) throw StateError("classify_users: trace has not converged");
  const Vector& achieved = trace.last().sinr;
  if (static_cast<std::size_t>(achieved.size()) != targets.size())
    throw StateError("classify_users: target count does not match user count");
  std::vector<UserOutcome> out;
  out.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double rel = (achieved(static_cast<Eigen::Index>(i)) - targets[i]) / targets[i];
    out.push_back(rel < -tolerance  ? UserOutcome::below_target
                  : rel > tolerance ? UserOutcome::above_target
                                    : UserOutcome::at_target);
  }
  return out;
}

namespace {

bool any_below(const std::vector<UserOutcome>& outcomes) {
  return std::find(outcomes.begin(), outcomes.end(), UserOutcome::below_target) != outcomes.end();
}

}  // namespace

EscalationResult escalate_pricing(const Problem& problem, PricingRule rule, double c0, double dc, int max_steps,
                                  double tolerance) {
  if (!(dc > 0.0)) throw ConfigError("escalate_pricing: dc must be positive");
  if (max_steps < 1) throw ConfigError("escalate_pricing: max_steps must be at least 1");
  EscalationResult result;
  for (int k = 0; k < max_steps; ++k) {
    rule.c = c0 + k * dc;
    Problem priced = problem;
    apply_pricing(priced, rule);
    result.tested.push_back(rule.c);
    result.c_final = rule.c;
    result.trace = iterate_to_convergence(priced);
    if (!result.trace.converged) continue;
    const auto targets = target_sinrs(priced.users, priced.channel.bandwidth_hz);
    if (!any_below(classify_users(result.trace, targets, tolerance))) {
      result.achieved = true;
      break;
    }
  }
  return result;
}

Problem subset(const Problem& problem, std::span<const int> keep) {
  Problem out;
  out.options = problem.options;
  out.channel = problem.channel;
  out.channel.distances_m.resize(static_cast<Eigen::Index>(keep.size()), problem.channel.stations());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.channel.distances_m.row(static_cast<Eigen::Index>(k)) = problem.channel.distances_m.row(keep[k]);
    out.users.push_back(problem.users[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

RemovalResult removal_loop(const Problem& problem, double tolerance) {
  RemovalResult result;
  result.remaining.resize(problem.users.size());
  std::iota(result.remaining.begin(), result.remaining.end(), 0);

  while (!result.remaining.empty()) {
    const Problem current = subset(problem, result.remaining);
    RemovalRound round{result.remaining, iterate_to_convergence(current)};
    const auto targets = target_sinrs(current.users, current.channel.bandwidth_hz);
    const auto outcomes = classify_users(round.trace, targets, tolerance);
    result.rounds.push_back(round);
    if (!any_below(outcomes)) return result;

    std::size_t worst = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i] != UserOutcome::below_target) continue;
      const double ratio = round.trace.last().sinr(static_cast<Eigen::Index>(i)) / targets[i];
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst = i;
      }
    }
    result.removed.push_back(result.remaining[worst]);
    result.remaining.erase(result.remaining.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  result.empty_network = true;
  return result;
}

}  // namespace jrpc
