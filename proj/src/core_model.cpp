#include "jrpc/core_model.hpp"

#include <cmath>

namespace jrpc {

Matrix ChannelModel::gains() const {
  Matrix g(stations(), users());
  for (Eigen::Index i = 0; i < users(); ++i)
    for (Eigen::Index a = 0; a < stations(); ++a)
      g(a, i) = path_gain(distances_m(i, a), pathloss_exponent, shadowing);
  return g;
}

void ChannelModel::validate() const {
  if (stations() < 1) throw DomainError("channel: at least one base station required");
  if (!(pathloss_exponent > 0.0)) throw DomainError("channel: pathloss exponent must be positive");
  if (!(shadowing > 0.0)) throw DomainError("channel: shadowing must be positive");
  if (!(noise_w >= 0.0)) throw DomainError("channel: noise power must be non-negative");
  if (!(bandwidth_hz > 0.0)) throw DomainError("channel: bandwidth must be positive");
  if (users() > 0 && !(distances_m.minCoeff() > 0.0))
    throw DomainError("channel: distances must be positive");
  const Matrix g = gains();
  if (!g.allFinite() || (g.size() > 0 && !(g.minCoeff() > 0.0)))
    throw DomainError("channel: gains must be finite and positive");
}

void UserParams::validate() const {
  if (!(alpha1 > 0.0 && alpha2 > 0.0)) throw DomainError("user: alpha1 and alpha2 must be positive");
  if (!(lambda > 0.0)) throw DomainError("user: lambda must be positive");
  if (!(p_min > 0.0 && p_min <= p_max)) throw DomainError("user: need 0 < p_min <= p_max");
  if (!(r_min > 0.0 && r_min <= r_max)) throw DomainError("user: need 0 < r_min <= r_max");
  if (!(p_init >= p_min && p_init <= p_max)) throw DomainError("user: p_init outside [p_min, p_max]");
  if (!(r_init >= r_min && r_init <= r_max)) throw DomainError("user: r_init outside [r_min, r_max]");
}

Matrix effective_interference_matrix(const Matrix& gains, const Vector& powers, double noise) {
  Matrix r_eff(gains.rows(), gains.cols());
  for (Eigen::Index a = 0; a < gains.rows(); ++a)
    for (Eigen::Index i = 0; i < gains.cols(); ++i)
      r_eff(a, i) = effective_interference(gains.row(a).transpose(), powers, i, noise);
  return r_eff;
}

}  // namespace jrpc
