#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>

#include "jrpc/core_model.hpp"

// Reference computations for checking the solver. Nothing here calls the
// best-response or iteration code.
namespace jrpc::oracle {

struct Box {
  double p_min = 1e-6;
  double p_max = 3.0;
  double r_min = 0.1;
  double r_max = 1e5;
};

// Log-spaced axis with `n` points spanning [lo, hi].
struct LogAxis {
  double lo;
  double hi;
  int n;

  double at(int k) const;
  // Ratio between neighbouring points.
  double step_ratio() const;
};

struct GridOptimum {
  Strategy strategy;
  double utility;
  LogAxis power_axis;
  LogAxis rate_axis;

  // True when `s` lies within one grid cell of the grid argmax on both axes.
  bool within_one_cell(const Strategy& s) const;
};

// Exhaustive argmax of the priced utility over a grid_n x grid_n log grid.
GridOptimum grid_best_response(double r_eff, double alpha1, double alpha2, double lambda, const Box& box,
                               int grid_n);

struct CalculusCheck {
  double gradient_error = 0.0;  // worst relative error of the analytic gradient
  double hessian_error = 0.0;   // worst relative error of the analytic Hessian
  double worst() const {
    if (std::isnan(gradient_error) || std::isnan(hessian_error)) return std::numeric_limits<double>::infinity();
    return std::max(gradient_error, hessian_error);
  }
};

// Central differences (relative step 1e-6, long double) against the closed
// form first and second derivatives of the priced utility.
CalculusCheck fd_gradient_check(const Strategy& s, double r_eff, double alpha1, double alpha2, double lambda);

using PowerMap = std::function<Vector(const Vector&)>;

struct StandardFunctionReport {
  int samples = 0;
  int positivity_failures = 0;
  int monotonicity_failures = 0;
  int scalability_failures = 0;
  std::string first_counterexample;

  bool passed() const { return positivity_failures + monotonicity_failures + scalability_failures == 0; }
  StandardFunctionReport& operator+=(const StandardFunctionReport& other);
};

// Positivity, monotonicity (against a random dominated point) and scalability
// (random a in (1, 10]) at every point of `points`.
StandardFunctionReport standard_function_check(const PowerMap& map, std::span<const Vector> points,
                                               std::mt19937_64& rng, double slack = 1e-12);

}  // namespace jrpc::oracle
