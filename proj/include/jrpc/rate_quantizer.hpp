#pragma once

#include <stdexcept>
#include <vector>

namespace jrpc {

class NoFeasibleRate : public std::runtime_error {
 public:
  explicit NoFeasibleRate(double rate);
  double requested_rate() const { return rate_; }

 private:
  double rate_;
};

// Sorted, duplicate-free set of admissible rates in bps.
class RateSet {
 public:
  explicit RateSet(std::vector<double> rates);

  const std::vector<double>& rates() const { return rates_; }
  double smallest() const { return rates_.front(); }

 private:
  std::vector<double> rates_;
};

// Largest admissible rate not above `rate`.
double quantize_down(double rate, const RateSet& set);

enum class QuantizeMode { every_iteration, at_convergence };

}  // namespace jrpc
