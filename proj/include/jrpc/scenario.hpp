#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jrpc/admission.hpp"
#include "jrpc/game_engine.hpp"

namespace jrpc {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& context, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct UserSpec {
  std::string name;
  UserParams params;
  Vector distances_m;  // one entry per station
  int station = 0;     // initial assignment
};

// A user joining the running game at `iteration` (1-based).
struct ArrivalEvent {
  int iteration = 1;
  UserSpec user;
};

// A user's distances change at outer step `step` (1-based); every step is
// solved to convergence.
struct MoveEvent {
  int step = 1;
  std::string user;
  Vector distances_m;
};

using Event = std::variant<ArrivalEvent, MoveEvent>;

struct Scenario {
  // Channel constants; distances live on the users.
  int stations = 1;
  double pathloss_exponent = 4.0;
  double shadowing = 0.097;
  double noise_w = 5e-15;
  double bandwidth_hz = 1e6;

  std::vector<UserSpec> users;
  SolverOptions options;
  std::optional<PricingRule> pricing;
  double tolerance = kAtTargetTolerance;
  std::vector<Event> events;

  ChannelModel channel() const;
  // Channel and users with the pricing rule applied; events are ignored.
  Problem problem() const;
  int steps() const;
  Eigen::Index user_index(std::string_view name) const;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string to_text(const Scenario& scenario);

struct UserSummary {
  std::string name;
  int station = 0;
  double power = 0.0;
  double rate = 0.0;
  double sinr = 0.0;
  double target_sinr = 0.0;
  UserOutcome category = UserOutcome::at_target;
};

struct StepSummary {
  int step = 1;
  bool converged = false;
  int iterations = 0;
  int first_iteration = 1;  // global iteration number of this step's first record
  std::vector<UserSummary> users;
};

struct Summary {
  std::vector<StepSummary> steps;
  bool converged() const;
};

struct ScenarioResult {
  IterationTrace trace;  // all steps, iterations numbered globally
  Summary summary;
};

ScenarioResult run_scenario(const Scenario& scenario);

void emit_trace(const IterationTrace& trace, std::ostream& out);
void emit_trace(const IterationTrace& trace, const std::string& path);
void write_summary(const Summary& summary, std::ostream& out);
void write_summary(const Summary& summary, const std::string& path);

}  // namespace jrpc
