#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "jrpc/scenario.hpp"

namespace jrpc {

enum class ReproTarget { table1, table2, table3, table4, fig1, fig2, fig3, fig4 };

std::string_view to_string(ReproTarget target);
ReproTarget repro_target_from_string(std::string_view name);
std::vector<ReproTarget> all_repro_targets();

// Names of the built-in scenario documents, e.g. "table2-s1", "fig4".
std::vector<std::string> builtin_scenario_names();
std::string builtin_scenario_text(std::string_view name);
Scenario builtin_scenario(std::string_view name);

struct Check {
  std::string group;  // e.g. "table3/boundary"
  std::string label;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;  // relative; 0 for structural checks
  bool pass = false;
  bool informational = false;  // reported but never fails the target
};

struct ReproReport {
  ReproTarget target;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const;
  // All non-informational checks of `group` (prefix match) pass.
  bool group_passed(std::string_view group) const;
  void print(std::ostream& out) const;
};

ReproReport reproduce(ReproTarget target);

// Converged strategies for every lambda of a sweep (constant pricing).
struct LambdaPoint {
  double lambda;
  IterationTrace trace;
};
std::vector<LambdaPoint> sweep_lambda(const Scenario& scenario, double from, double to, int steps);

}  // namespace jrpc
