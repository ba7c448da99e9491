#include <fstream>
#include <iomanip>
#include <ostream>

#include "jrpc/scenario.hpp"

namespace jrpc {

namespace {

StepSummary summarize(int step, int first_iteration, const IterativeSolver& solver, const std::vector<std::string>& names,
                      double tolerance) {
  StepSummary s;
  s.step = step;
  s.converged = solver.converged();
  s.iterations = solver.iterations();
  s.first_iteration = first_iteration;
  const auto& rec = solver.trace().last();
  const auto targets = target_sinrs(solver.users(), solver.channel().bandwidth_hz);
  std::vector<UserOutcome> categories;
  if (s.converged) categories = classify_users(solver.trace(), targets, tolerance);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    UserSummary u;
    u.name = names[i];
    u.station = rec.assignment[i];
    u.power = rec.power(k);
    u.rate = rec.rate(k);
    u.sinr = rec.sinr(k);
    u.target_sinr = targets[i];
    if (s.converged) u.category = categories[i];
    s.users.push_back(u);
  }
  return s;
}

void append(IterationTrace& all, const IterationTrace& part, int offset) {
  for (auto rec : part.records) {
    rec.iteration += offset;
    all.records.push_back(std::move(rec));
  }
  all.iterations_used += part.iterations_used;
}

}  // namespace

bool Summary::converged() const {
  return std::all_of(steps.begin(), steps.end(), [](const StepSummary& s) { return s.converged; });
}

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult result;
  Problem base = scenario.problem();
  std::vector<std::string> names;
  for (const auto& u : scenario.users) names.push_back(u.name);

  NetworkState start = initial_state(base.users);
  for (std::size_t i = 0; i < scenario.users.size(); ++i) start.assignment[i] = scenario.users[i].station;

  std::vector<const ArrivalEvent*> arrivals;
  for (const auto& e : scenario.events)
    if (const auto* a = std::get_if<ArrivalEvent>(&e)) arrivals.push_back(a);

  if (!arrivals.empty()) {
    IterativeSolver solver(base.channel, base.users, base.options, start);
    const int budget = base.options.convergence.max_iterations;
    std::size_t next = 0;
    while (solver.iterations() < budget) {
      if (next < arrivals.size() && solver.iterations() + 1 == arrivals[next]->iteration) {
        const UserSpec& spec = arrivals[next]->user;
        UserParams params = spec.params;
        if (scenario.pricing) {
          const double gain = path_gain(spec.distances_m(0), scenario.pathloss_exponent, scenario.shadowing);
          params.lambda = pricing_rule_eval(*scenario.pricing, static_cast<int>(names.size()) + 1, gain,
                                            params.alpha1, params.alpha2, scenario.stations > 1);
        }
        solver.add_user(params, spec.distances_m, spec.station);
        names.push_back(spec.name);
        ++next;
      }
      if (solver.converged() && next == arrivals.size()) break;
      solver.step();
    }
    result.trace = solver.trace();
    result.summary.steps.push_back(summarize(1, 1, solver, names, scenario.tolerance));
    return result;
  }

  ChannelModel channel = base.channel;
  std::vector<int> carried = start.assignment;
  result.trace.converged = true;
  for (int step = 1; step <= scenario.steps(); ++step) {
    for (const auto& e : scenario.events) {
      const auto* m = std::get_if<MoveEvent>(&e);
      if (m && m->step == step) channel.distances_m.row(scenario.user_index(m->user)) = m->distances_m.transpose();
    }
    NetworkState state = initial_state(base.users);
    state.assignment = carried;
    IterativeSolver solver(channel, base.users, base.options, state);
    solver.run();
    const int offset = result.trace.iterations_used;
    append(result.trace, solver.trace(), offset);
    result.trace.converged = result.trace.converged && solver.converged();
    result.summary.steps.push_back(summarize(step, offset + 1, solver, names, scenario.tolerance));
    carried = solver.state().assignment;
  }
  return result;
}

void emit_trace(const IterationTrace& trace, std::ostream& out) {
  out << "iter,user,bs,p_w,r_bps,sinr,utility,metric\n";
  out << std::setprecision(15);
  for (const auto& rec : trace.records)
    for (Eigen::Index i = 0; i < rec.power.size(); ++i)
      out << rec.iteration << ',' << i << ',' << rec.assignment[static_cast<std::size_t>(i)] << ',' << rec.power(i)
          << ',' << rec.rate(i) << ',' << rec.sinr(i) << ',' << rec.utility(i) << ',' << rec.metric << '\n';
}

void emit_trace(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file '" + path + "'");
  emit_trace(trace, out);
  if (!out) throw std::runtime_error("error while writing trace file '" + path + "'");
}

void write_summary(const Summary& summary, std::ostream& out) {
  out << std::setprecision(15) << std::boolalpha;
  out << "steps = " << summary.steps.size() << "\n";
  out << "converged = " << summary.converged() << "\n";
  for (const auto& s : summary.steps) {
    const std::string sp = "step." + std::to_string(s.step) + ".";
    out << sp << "converged = " << s.converged << "\n"
        << sp << "iterations = " << s.iterations << "\n"
        << sp << "first_iteration = " << s.first_iteration << "\n"
        << sp << "users = " << s.users.size() << "\n";
    for (std::size_t i = 0; i < s.users.size(); ++i) {
      const auto& u = s.users[i];
      const std::string up = sp + "user." + std::to_string(i) + ".";
      out << up << "name = " << u.name << "\n"
          << up << "bs = " << u.station << "\n"
          << up << "p_w = " << u.power << "\n"
          << up << "r_bps = " << u.rate << "\n"
          << up << "sinr = " << u.sinr << "\n"
          << up << "target_sinr = " << u.target_sinr << "\n"
          << up << "category = " << (s.converged ? std::string(to_string(u.category)) : "unconverged") << "\n";
    }
  }
}

void write_summary(const Summary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file '" + path + "'");
  write_summary(summary, out);
}

}  // namespace jrpc
