#include "jrpc/rate_quantizer.hpp"

#include <algorithm>
#include <string>

namespace jrpc {

NoFeasibleRate::NoFeasibleRate(double rate)
    : std::runtime_error("no admissible rate at or below " + std::to_string(rate) + " bps"), rate_(rate) {}

RateSet::RateSet(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) throw std::invalid_argument("rate set must not be empty");
  std::sort(rates_.begin(), rates_.end());
  if (!(rates_.front() > 0.0)) throw std::invalid_argument("rate set entries must be positive");
  if (std::adjacent_find(rates_.begin(), rates_.end()) != rates_.end())
    throw std::invalid_argument("rate set entries must be distinct");
}

double quantize_down(double rate, const RateSet& set) {
  const auto& r = set.rates();
  auto it = std::upper_bound(r.begin(), r.end(), rate);
  if (it == r.begin()) throw NoFeasibleRate(rate);
  return *std::prev(it);
}

}  // namespace jrpc
