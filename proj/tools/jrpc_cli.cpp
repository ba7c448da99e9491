#include <iomanip>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "jrpc/admission.hpp"
#include "jrpc/reproduce.hpp"
#include "jrpc/scenario.hpp"

namespace {

using namespace jrpc;

int cmd_run(const std::string& file, const std::string& trace_path, const std::string& summary_path,
            const std::string& policy, const std::string& schedule) {
  Scenario sc = load_scenario(file);
  if (policy == "kkt") sc.options.policy = UpdatePolicy::kkt;
  else if (policy == "clamp") sc.options.policy = UpdatePolicy::clamp;
  if (schedule == "seq") sc.options.schedule = Schedule::sequential;
  else if (schedule == "sync") sc.options.schedule = Schedule::synchronous;

  const auto result = run_scenario(sc);
  if (!trace_path.empty()) emit_trace(result.trace, trace_path);
  if (!summary_path.empty()) write_summary(result.summary, summary_path);
  else write_summary(result.summary, std::cout);
  if (!result.summary.converged()) std::cerr << "warning: run did not converge\n";
  return result.summary.converged() ? 0 : 1;
}

int cmd_reproduce(const std::string& target) {
  std::vector<ReproTarget> targets;
  if (target == "all") targets = all_repro_targets();
  else targets.push_back(repro_target_from_string(target));
  bool ok = true;
  for (auto t : targets) {
    const auto report = reproduce(t);
    report.print(std::cout);
    std::cout << (report.passed() ? "PASS " : "FAIL ") << to_string(t) << "\n";
    ok = ok && report.passed();
  }
  return ok ? 0 : 1;
}

int cmd_sweep(const std::string& file, double from, double to, int steps) {
  const Scenario sc = load_scenario(file);
  const auto sweep = sweep_lambda(sc, from, to, steps);
  bool ok = true;
  std::cout << "lambda,user,bs,p_w,r_bps,sinr,converged\n" << std::setprecision(15) << std::boolalpha;
  for (const auto& pt : sweep) {
    const auto& rec = pt.trace.last();
    ok = ok && pt.trace.converged;
    for (Eigen::Index i = 0; i < rec.power.size(); ++i)
      std::cout << pt.lambda << ',' << i << ',' << rec.assignment[static_cast<std::size_t>(i)] << ','
                << rec.power(i) << ',' << rec.rate(i) << ',' << rec.sinr(i) << ',' << pt.trace.converged << '\n';
  }
  return ok ? 0 : 1;
}

double common_lambda(const Scenario& sc) {
  std::set<double> lambdas;
  for (const auto& u : sc.users) lambdas.insert(u.params.lambda);
  if (lambdas.size() != 1)
    throw ConfigError("users have different lambdas; give a [run] pricing rule to tune instead");
  return *lambdas.begin();
}

int cmd_tune(const std::string& file, double dc, int max_steps) {
  const Scenario sc = load_scenario(file);
  PricingRule rule;
  if (sc.pricing) {
    rule = *sc.pricing;
  } else {
    rule.kind = PricingRule::Kind::constant;
    rule.c = common_lambda(sc);
    rule.dc = 0.25 * rule.c;
  }
  if (dc <= 0.0) dc = rule.dc;
  const auto result = escalate_pricing(sc.problem(), rule, rule.c, dc, max_steps, sc.tolerance);

  std::cout << std::setprecision(15) << std::boolalpha << "rule = " << to_string(rule.kind) << "\n"
            << "c0 = " << rule.c << "\n"
            << "dc = " << dc << "\n"
            << "runs = " << result.tested.size() << "\n"
            << "achieved = " << result.achieved << "\n"
            << "c_final = " << result.c_final << "\n";
  if (!result.trace.records.empty()) {
    const auto& rec = result.trace.last();
    for (Eigen::Index i = 0; i < rec.power.size(); ++i) {
      const auto& name = sc.users[static_cast<std::size_t>(i)].name;
      std::cout << "user." << i << ".name = " << name << "\n"
                << "user." << i << ".p_w = " << rec.power(i) << "\n"
                << "user." << i << ".r_bps = " << rec.rate(i) << "\n"
                << "user." << i << ".sinr = " << rec.sinr(i) << "\n";
    }
  }
  if (!result.achieved) std::cerr << "pricing escalation exhausted; some users may have to be removed\n";
  return result.achieved ? 0 : 1;
}

int cmd_remove(const std::string& file) {
  const Scenario sc = load_scenario(file);
  const auto result = removal_loop(sc.problem(), sc.tolerance);
  std::cout << std::setprecision(15) << std::boolalpha << "removed =";
  for (int i : result.removed) std::cout << ' ' << sc.users[static_cast<std::size_t>(i)].name;
  std::cout << "\nempty_network = " << result.empty_network << "\n";
  if (!result.empty_network) {
    const auto& rec = result.final_trace().last();
    for (std::size_t k = 0; k < result.remaining.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const auto& name = sc.users[static_cast<std::size_t>(result.remaining[k])].name;
      std::cout << "user." << k << ".name = " << name << "\n"
                << "user." << k << ".p_w = " << rec.power(i) << "\n"
                << "user." << k << ".r_bps = " << rec.rate(i) << "\n"
                << "user." << k << ".sinr = " << rec.sinr(i) << "\n";
    }
  }
  return result.empty_network ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint rate and power control games for CDMA uplinks"};
  app.require_subcommand(1);

  std::string file, trace_path, summary_path, policy, schedule, target, name;
  double from = 0.0, to = 0.0, dc = 0.0;
  int steps = 10, max_steps = 40;

  auto* run = app.add_subcommand("run", "Run a scenario file to convergence");
  run->add_option("scenario", file, "Scenario file")->required();
  run->add_option("--trace", trace_path, "Write the per-iteration CSV trace here");
  run->add_option("--summary", summary_path, "Write the summary here instead of stdout");
  run->add_option("--policy", policy, "Boundary policy")->check(CLI::IsMember({"clamp", "kkt"}));
  run->add_option("--schedule", schedule, "Update schedule")->check(CLI::IsMember({"sync", "seq"}));

  auto* repro = app.add_subcommand("reproduce", "Rerun a published experiment and compare");
  repro->add_option("target", target, "table1..table4, fig1..fig4, or all")->required();

  auto* sweep = app.add_subcommand("sweep-lambda", "Converged strategies over a lambda range");
  sweep->add_option("scenario", file, "Scenario file")->required();
  sweep->add_option("--from", from, "First lambda")->required();
  sweep->add_option("--to", to, "Last lambda")->required();
  sweep->add_option("--steps", steps, "Number of lambda values")->check(CLI::PositiveNumber);

  auto* tune = app.add_subcommand("tune-pricing", "Raise pricing until no user is below target");
  tune->add_option("scenario", file, "Scenario file")->required();
  tune->add_option("--dc", dc, "Pricing increment (default from the scenario, else c0/4)");
  tune->add_option("--max-steps", max_steps, "Maximum number of pricing values tried")->check(CLI::PositiveNumber);

  auto* remove = app.add_subcommand("remove-loop", "Remove below-target users one at a time");
  remove->add_option("scenario", file, "Scenario file")->required();

  auto* builtin = app.add_subcommand("builtin", "Print a built-in scenario document");
  builtin->add_option("name", name, "Scenario name; omit to list them");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(file, trace_path, summary_path, policy, schedule);
    if (*repro) return cmd_reproduce(target);
    if (*sweep) return cmd_sweep(file, from, to, steps);
    if (*tune) return cmd_tune(file, dc, max_steps);
    if (*remove) return cmd_remove(file);
    if (*builtin) {
      if (name.empty()) {
        for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
      } else {
        std::cout << builtin_scenario_text(name);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
