#include "jrpc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jrpc::oracle {

double LogAxis::at(int k) const {
  if (n == 1) return lo;
  return lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
}

double LogAxis::step_ratio() const { return n == 1 ? 1.0 : std::pow(hi / lo, 1.0 / (n - 1)); }

bool GridOptimum::within_one_cell(const Strategy& s) const {
  // small slack so a point exactly one cell away still counts
  const double tol = 1.0 + 1e-9;
  const double p_dist = std::abs(std::log(s.power / strategy.power));
  const double r_dist = std::abs(std::log(s.rate / strategy.rate));
  return p_dist <= tol * std::log(power_axis.step_ratio()) && r_dist <= tol * std::log(rate_axis.step_ratio());
}

GridOptimum grid_best_response(double r_eff, double alpha1, double alpha2, double lambda, const Box& box,
                               int grid_n) {
  GridOptimum best{{}, -std::numeric_limits<double>::infinity(), {box.p_min, box.p_max, grid_n},
                   {box.r_min, box.r_max, grid_n}};
  for (int i = 0; i < grid_n; ++i) {
    const double p = best.power_axis.at(i);
    for (int j = 0; j < grid_n; ++j) {
      const double r = best.rate_axis.at(j);
      const double u = utility_priced(p, r, r_eff, alpha1, alpha2, lambda);
      if (u > best.utility) {
        best.utility = u;
        best.strategy = {p, r};
      }
    }
  }
  return best;
}

namespace {

using Real = long double;

double rel_err(Real analytic, Real numeric) {
  if (!std::isfinite(analytic) || !std::isfinite(numeric)) return std::numeric_limits<double>::infinity();
  const Real scale = std::max({std::abs(analytic), std::abs(numeric), std::numeric_limits<Real>::min()});
  return static_cast<double>(std::abs(analytic - numeric) / scale);
}

}  // namespace

CalculusCheck fd_gradient_check(const Strategy& s, double r_eff, double alpha1, double alpha2, double lambda) {
  constexpr Real rel_step = 1e-6L;
  const Real p = s.power, r = s.rate, R = r_eff, a1 = alpha1, a2 = alpha2, lam = lambda;
  const Real hp = rel_step * p, hr = rel_step * r;

  auto u = [&](Real pp, Real rr) { return utility_priced<Real>(pp, rr, R, a1, a2, lam); };
  auto grad = [&](Real pp, Real rr) { return utility_priced_gradient<Real>(pp, rr, R, a1, a2, lam); };

  using Vec2 = Eigen::Matrix<Real, 2, 1>;
  const Vec2 g = grad(p, r);
  const Eigen::Matrix<Real, 2, 2> h = utility_priced_hessian<Real>(p, r, R, a1, a2, lam);

  CalculusCheck out;
  out.gradient_error = std::max(rel_err(g(0), (u(p + hp, r) - u(p - hp, r)) / (2 * hp)),
                                rel_err(g(1), (u(p, r + hr) - u(p, r - hr)) / (2 * hr)));

  const Vec2 dgp = (grad(p + hp, r) - grad(p - hp, r)) / (2 * hp);
  const Vec2 dgr = (grad(p, r + hr) - grad(p, r - hr)) / (2 * hr);
  out.hessian_error = std::max({rel_err(h(0, 0), dgp(0)), rel_err(h(1, 0), dgp(1)), rel_err(h(0, 1), dgr(0)),
                                rel_err(h(1, 1), dgr(1))});
  // Second differences of the utility itself, independent of the gradient.
  const Real big_hp = 1e-4L * p, big_hr = 1e-4L * r;
  const Real upp = (u(p + big_hp, r) - 2 * u(p, r) + u(p - big_hp, r)) / (big_hp * big_hp);
  const Real urr = (u(p, r + big_hr) - 2 * u(p, r) + u(p, r - big_hr)) / (big_hr * big_hr);
  const Real upr = (u(p + big_hp, r + big_hr) - u(p + big_hp, r - big_hr) - u(p - big_hp, r + big_hr) +
                    u(p - big_hp, r - big_hr)) /
                   (4 * big_hp * big_hr);
  out.hessian_error = std::max({out.hessian_error, rel_err(h(0, 0), upp), rel_err(h(1, 1), urr),
                                rel_err(h(0, 1), upr)});
  return out;
}

StandardFunctionReport& StandardFunctionReport::operator+=(const StandardFunctionReport& other) {
  samples += other.samples;
  positivity_failures += other.positivity_failures;
  monotonicity_failures += other.monotonicity_failures;
  scalability_failures += other.scalability_failures;
  if (first_counterexample.empty()) first_counterexample = other.first_counterexample;
  return *this;
}

StandardFunctionReport standard_function_check(const PowerMap& map, std::span<const Vector> points,
                                               std::mt19937_64& rng, double slack) {
  StandardFunctionReport report;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> scale(1.0, 10.0);

  auto note = [&](const char* what, const Vector& p) {
    if (!report.first_counterexample.empty()) return;
    std::ostringstream os;
    os << what << " at p = [" << p.transpose() << "]";
    report.first_counterexample = os.str();
  };

  for (const Vector& p : points) {
    ++report.samples;
    const Vector ip = map(p);
    if (!(ip.array() > 0.0).all()) {
      ++report.positivity_failures;
      note("positivity", p);
    }

    Vector lower = p;
    for (Eigen::Index k = 0; k < lower.size(); ++k) lower(k) *= unit(rng);
    const Vector ilower = map(lower);
    if (((ip.array() + slack * ip.array().abs()) < ilower.array()).any()) {
      ++report.monotonicity_failures;
      note("monotonicity", p);
    }

    double a = scale(rng);
    if (a == 1.0) a = std::nextafter(1.0, 2.0);
    const Vector iscaled = map(a * p);
    if (((a * ip.array()) * (1.0 + slack) < iscaled.array()).any()) {
      ++report.scalability_failures;
      note("scalability", p);
    }
  }
  return report;
}

}  // namespace jrpc::oracle
