#include "jrpc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace jrpc {

ParseError::ParseError(int line, const std::string& context, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + (context.empty() ? "" : " (" + context + ")") + ": " +
                         message),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

struct Section {
  std::string kind;  // network, run, user, arrival, move
  std::string label;
  int line;
  std::vector<Entry> entries;

  std::string context() const { return label.empty() ? "[" + kind + "]" : "[" + kind + " " + label + "]"; }
};

class SectionReader {
 public:
  SectionReader(const Section& s, std::set<std::string> allowed) : section_(s) {
    for (const auto& e : s.entries) {
      if (!allowed.count(e.key)) throw ParseError(e.line, section_.context(), "unknown key '" + e.key + "'");
      if (!values_.emplace(e.key, &e).second)
        throw ParseError(e.line, section_.context(), "duplicate key '" + e.key + "'");
    }
  }

  const Entry* find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : it->second;
  }

  double number(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_number(*e, e->value) : fallback;
  }

  int integer(const std::string& key, int fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    int v = 0;
    const auto* end = e->value.data() + e->value.size();
    auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(*e, "expected an integer, got '" + e->value + "'");
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return {};
    std::vector<double> out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(parse_number(*e, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  [[noreturn]] void fail(const Entry& e, const std::string& message) const {
    throw ParseError(e.line, section_.context() + " key '" + e.key + "'", message);
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(section_.line, section_.context(), message);
  }

  const Section& section() const { return section_; }

 private:
  double parse_number(const Entry& e, std::string_view s) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) fail(e, "expected a number, got '" + std::string(s) + "'");
    return v;
  }

  const Section& section_;
  std::map<std::string, const Entry*> values_;
};

std::vector<Section> split_sections(std::string_view text) {
  std::vector<Section> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
      std::string_view inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      std::string head(inner.substr(0, space));
      std::string label(space == std::string_view::npos ? "" : trim(inner.substr(space)));
      Section s{head, label, line_no, {}};
      if (head == "network" || head == "run") {
        if (!label.empty()) throw ParseError(line_no, "[" + head + "]", "section takes no label");
      } else if (head == "user") {
        if (label.empty()) throw ParseError(line_no, "[user]", "user section needs a name");
      } else if (head == "event") {
        if (label != "arrival" && label != "move")
          throw ParseError(line_no, "[event]", "event kind must be 'arrival' or 'move'");
        s.kind = label;
        s.label.clear();
      } else {
        throw ParseError(line_no, "", "unknown section '" + head + "'");
      }
      sections.push_back(std::move(s));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
    if (sections.empty()) throw ParseError(line_no, "", "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, sections.back().context(), "empty key");
    sections.back().entries.push_back({key, value, line_no});
  }
  return sections;
}

const std::set<std::string> kUserKeys = {"distances_m", "alpha1", "alpha2", "lambda", "p_min", "p_max",
                                         "r_min",       "r_max",  "p_init", "r_init", "station"};

UserSpec read_user(const SectionReader& rd, const std::string& name, int stations) {
  UserSpec u;
  u.name = name;
  UserParams& p = u.params;
  p.alpha1 = rd.number("alpha1", p.alpha1);
  p.alpha2 = rd.number("alpha2", p.alpha2);
  if (const Entry* e = rd.find("lambda")) {
    const auto values = rd.list("lambda");
    if (values.size() != 1 && values.size() != static_cast<std::size_t>(stations))
      rd.fail(*e, "give one lambda, or one per base station");
    if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) != values.end())
      rd.fail(*e, "lambda must be identical for every base station");
    p.lambda = values.front();
  }
  p.p_min = rd.number("p_min", p.p_min);
  p.p_max = rd.number("p_max", p.p_max);
  p.r_min = rd.number("r_min", p.r_min);
  p.r_max = rd.number("r_max", p.r_max);
  p.p_init = rd.number("p_init", p.p_min);
  p.r_init = rd.number("r_init", p.r_min);
  u.station = rd.integer("station", 0);

  const Entry* d = rd.find("distances_m");
  if (!d) rd.fail("missing 'distances_m'");
  const auto dist = rd.list("distances_m");
  if (dist.size() != static_cast<std::size_t>(stations))
    rd.fail(*d, "expected " + std::to_string(stations) + " distance(s), got " + std::to_string(dist.size()));
  u.distances_m = Eigen::Map<const Vector>(dist.data(), static_cast<Eigen::Index>(dist.size()));
  for (double x : dist)
    if (!(x > 0.0)) rd.fail(*d, "distances must be positive");
  if (u.station < 0 || u.station >= stations) rd.fail("station index out of range");
  try {
    p.validate();
  } catch (const DomainError& err) {
    rd.fail(err.what());
  }
  return u;
}

UpdatePolicy policy_from(const SectionReader& rd, const std::string& v) {
  if (v == "clamp") return UpdatePolicy::clamp;
  if (v == "kkt") return UpdatePolicy::kkt;
  rd.fail(*rd.find("policy"), "policy must be clamp or kkt");
}

Schedule schedule_from(const SectionReader& rd, const std::string& v) {
  if (v == "sync") return Schedule::synchronous;
  if (v == "seq") return Schedule::sequential;
  rd.fail(*rd.find("schedule"), "schedule must be sync or seq");
}

void read_run(const SectionReader& rd, Scenario& sc) {
  auto& o = sc.options;
  if (rd.find("policy")) o.policy = policy_from(rd, rd.text("policy", ""));
  if (rd.find("schedule")) o.schedule = schedule_from(rd, rd.text("schedule", ""));
  if (const Entry* e = rd.find("metric")) {
    if (e->value == "relative") o.convergence.metric = ConvergenceMetric::relative;
    else if (e->value == "paper_absolute") o.convergence.metric = ConvergenceMetric::paper_absolute;
    else rd.fail(*e, "metric must be relative or paper_absolute");
  }
  o.convergence.delta = rd.number("delta", o.convergence.delta);
  o.convergence.max_iterations = rd.integer("max_iterations", o.convergence.max_iterations);
  if (const Entry* e = rd.find("delta"); e && !(o.convergence.delta > 0.0)) rd.fail(*e, "delta must be positive");
  if (const Entry* e = rd.find("max_iterations"); e && o.convergence.max_iterations < 1)
    rd.fail(*e, "max_iterations must be at least 1");

  if (const Entry* e = rd.find("rates")) {
    try {
      o.rates = RateSet(rd.list("rates"));
    } catch (const std::invalid_argument& err) {
      rd.fail(*e, err.what());
    }
  }
  if (const Entry* e = rd.find("quantize")) {
    if (e->value == "every_iteration") o.quantize = QuantizeMode::every_iteration;
    else if (e->value == "at_convergence") o.quantize = QuantizeMode::at_convergence;
    else rd.fail(*e, "quantize must be every_iteration or at_convergence");
  }
  if (const Entry* e = rd.find("pricing")) {
    PricingRule rule;
    try {
      rule.kind = pricing_kind_from_string(e->value);
    } catch (const ConfigError& err) {
      rd.fail(*e, err.what());
    }
    rule.c = rd.number("pricing_c", rule.c);
    rule.dc = rd.number("pricing_dc", 0.25 * rule.c);
    if (!(rule.c > 0.0) || !(rule.dc > 0.0)) rd.fail(*e, "pricing_c and pricing_dc must be positive");
    if (rule.gain_dependent() && sc.stations > 1)
      rd.fail(*e, "gain-dependent pricing is not allowed with several base stations");
    sc.pricing = rule;
  } else if (const Entry* c = rd.find("pricing_c")) {
    rd.fail(*c, "pricing_c given without a pricing rule");
  }
  sc.tolerance = rd.number("tolerance", sc.tolerance);
  if (const Entry* e = rd.find("tolerance"); e && !(sc.tolerance > 0.0)) rd.fail(*e, "tolerance must be positive");
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string num_list(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v(i));
  return out;
}

void write_user_keys(std::ostream& os, const UserSpec& u) {
  const UserParams& p = u.params;
  os << "distances_m = " << num_list(u.distances_m) << "\n"
     << "alpha1 = " << num(p.alpha1) << "\n"
     << "alpha2 = " << num(p.alpha2) << "\n"
     << "lambda = " << num(p.lambda) << "\n"
     << "p_min = " << num(p.p_min) << "\n"
     << "p_max = " << num(p.p_max) << "\n"
     << "r_min = " << num(p.r_min) << "\n"
     << "r_max = " << num(p.r_max) << "\n"
     << "p_init = " << num(p.p_init) << "\n"
     << "r_init = " << num(p.r_init) << "\n"
     << "station = " << u.station << "\n";
}

}  // namespace

ChannelModel Scenario::channel() const {
  ChannelModel ch;
  ch.pathloss_exponent = pathloss_exponent;
  ch.shadowing = shadowing;
  ch.noise_w = noise_w;
  ch.bandwidth_hz = bandwidth_hz;
  ch.distances_m.resize(static_cast<Eigen::Index>(users.size()), stations);
  for (std::size_t i = 0; i < users.size(); ++i)
    ch.distances_m.row(static_cast<Eigen::Index>(i)) = users[i].distances_m.transpose();
  return ch;
}

Problem Scenario::problem() const {
  Problem p;
  p.channel = channel();
  p.options = options;
  for (const auto& u : users) p.users.push_back(u.params);
  if (pricing) apply_pricing(p, *pricing);
  return p;
}

int Scenario::steps() const {
  int n = 1;
  for (const auto& e : events)
    if (const auto* m = std::get_if<MoveEvent>(&e)) n = std::max(n, m->step);
  return n;
}

Eigen::Index Scenario::user_index(std::string_view name) const {
  for (std::size_t i = 0; i < users.size(); ++i)
    if (users[i].name == name) return static_cast<Eigen::Index>(i);
  return -1;
}

Scenario parse_scenario(std::string_view text) {
  const auto sections = split_sections(text);
  Scenario sc;

  // [network] first so user sections can be checked against the station count.
  int network_seen = 0, run_seen = 0;
  for (const auto& s : sections) {
    if (s.kind != "network") continue;
    if (++network_seen > 1) throw ParseError(s.line, "[network]", "duplicate section");
    SectionReader rd(s, {"stations", "pathloss_exponent", "shadowing", "noise_w", "bandwidth_hz"});
    sc.stations = rd.integer("stations", sc.stations);
    sc.pathloss_exponent = rd.number("pathloss_exponent", sc.pathloss_exponent);
    sc.shadowing = rd.number("shadowing", sc.shadowing);
    sc.noise_w = rd.number("noise_w", sc.noise_w);
    sc.bandwidth_hz = rd.number("bandwidth_hz", sc.bandwidth_hz);
    if (sc.stations < 1) rd.fail("stations must be at least 1");
    if (!(sc.pathloss_exponent > 0.0) || !(sc.shadowing > 0.0) || !(sc.noise_w >= 0.0) || !(sc.bandwidth_hz > 0.0))
      rd.fail("need pathloss_exponent > 0, shadowing > 0, noise_w >= 0, bandwidth_hz > 0");
  }

  std::set<std::string> names;
  std::map<std::string, int> last_move_step;
  int last_arrival = 0;
  for (const auto& s : sections) {
    if (s.kind == "network") continue;
    if (s.kind == "run") {
      if (++run_seen > 1) throw ParseError(s.line, "[run]", "duplicate section");
      SectionReader rd(s, {"policy", "schedule", "metric", "delta", "max_iterations", "rates", "quantize", "pricing",
                           "pricing_c", "pricing_dc", "tolerance"});
      read_run(rd, sc);
    } else if (s.kind == "user") {
      SectionReader rd(s, kUserKeys);
      if (!names.insert(s.label).second) rd.fail("duplicate user name '" + s.label + "'");
      sc.users.push_back(read_user(rd, s.label, sc.stations));
    } else if (s.kind == "arrival") {
      auto keys = kUserKeys;
      keys.insert({"iteration", "name"});
      SectionReader rd(s, keys);
      ArrivalEvent ev;
      ev.iteration = rd.integer("iteration", 0);
      const std::string name = rd.text("name", "");
      if (name.empty()) rd.fail("arrival needs a 'name'");
      if (!names.insert(name).second) rd.fail("duplicate user name '" + name + "'");
      if (ev.iteration < 1) rd.fail("arrival 'iteration' must be at least 1");
      if (ev.iteration <= last_arrival) rd.fail("arrival iterations must be strictly increasing");
      last_arrival = ev.iteration;
      ev.user = read_user(rd, name, sc.stations);
      sc.events.emplace_back(std::move(ev));
    } else if (s.kind == "move") {
      SectionReader rd(s, {"step", "user", "distances_m"});
      MoveEvent ev;
      ev.step = rd.integer("step", 0);
      ev.user = rd.text("user", "");
      if (ev.step < 1) rd.fail("move 'step' must be at least 1");
      if (sc.user_index(ev.user) < 0) rd.fail("move refers to unknown user '" + ev.user + "'");
      auto& last = last_move_step[ev.user];
      if (ev.step <= last) rd.fail("move steps must be strictly increasing per user");
      last = ev.step;
      const auto dist = rd.list("distances_m");
      if (dist.size() != static_cast<std::size_t>(sc.stations))
        rd.fail("move needs one distance per base station");
      for (double x : dist)
        if (!(x > 0.0)) rd.fail("distances must be positive");
      ev.distances_m = Eigen::Map<const Vector>(dist.data(), static_cast<Eigen::Index>(dist.size()));
      sc.events.emplace_back(std::move(ev));
    }
  }

  if (sc.users.empty()) throw ParseError(1, "", "scenario declares no users");
  if (last_arrival > 0 && !last_move_step.empty())
    throw ParseError(1, "", "arrival and move events cannot be combined in one scenario");
  if (sc.pricing && sc.pricing->gain_dependent() && sc.stations > 1)
    throw ParseError(1, "[run]", "gain-dependent pricing is not allowed with several base stations");
  sc.options.reassign = sc.stations > 1;
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_text(const Scenario& sc) {
  std::ostringstream os;
  os << "[network]\n"
     << "stations = " << sc.stations << "\n"
     << "pathloss_exponent = " << num(sc.pathloss_exponent) << "\n"
     << "shadowing = " << num(sc.shadowing) << "\n"
     << "noise_w = " << num(sc.noise_w) << "\n"
     << "bandwidth_hz = " << num(sc.bandwidth_hz) << "\n\n";

  const auto& o = sc.options;
  os << "[run]\n"
     << "policy = " << (o.policy == UpdatePolicy::clamp ? "clamp" : "kkt") << "\n"
     << "schedule = " << (o.schedule == Schedule::synchronous ? "sync" : "seq") << "\n"
     << "metric = " << (o.convergence.metric == ConvergenceMetric::relative ? "relative" : "paper_absolute") << "\n"
     << "delta = " << num(o.convergence.delta) << "\n"
     << "max_iterations = " << o.convergence.max_iterations << "\n"
     << "tolerance = " << num(sc.tolerance) << "\n";
  if (o.rates) {
    os << "rates = ";
    for (std::size_t k = 0; k < o.rates->rates().size(); ++k) os << (k ? ", " : "") << num(o.rates->rates()[k]);
    os << "\nquantize = " << (o.quantize == QuantizeMode::every_iteration ? "every_iteration" : "at_convergence")
       << "\n";
  }
  if (sc.pricing)
    os << "pricing = " << to_string(sc.pricing->kind) << "\n"
       << "pricing_c = " << num(sc.pricing->c) << "\n"
       << "pricing_dc = " << num(sc.pricing->dc) << "\n";

  for (const auto& u : sc.users) {
    os << "\n[user " << u.name << "]\n";
    write_user_keys(os, u);
  }
  for (const auto& e : sc.events) {
    if (const auto* a = std::get_if<ArrivalEvent>(&e)) {
      os << "\n[event arrival]\niteration = " << a->iteration << "\nname = " << a->user.name << "\n";
      write_user_keys(os, a->user);
    } else {
      const auto& m = std::get<MoveEvent>(e);
      os << "\n[event move]\nstep = " << m.step << "\nuser = " << m.user << "\ndistances_m = " << num_list(m.distances_m)
         << "\n";
    }
  }
  return os.str();
}

}  // namespace jrpc
