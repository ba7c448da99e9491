#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jrpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Physical and game constants.
struct ChannelModel {
  Matrix distances_m;  // user x base-station
  double pathloss_exponent = 4.0;
  double shadowing = 0.097;
  double noise_w = 5e-15;
  double bandwidth_hz = 1e6;

  Eigen::Index users() const { return distances_m.rows(); }
  Eigen::Index stations() const { return distances_m.cols(); }

  // Gain matrix, station x user (row a holds g_{a,.}).
  Matrix gains() const;

  void validate() const;
};

struct UserParams {
  double alpha1 = 1e6;
  double alpha2 = 20.0;
  double lambda = 1e-4;
  double p_min = 1e-6;
  double p_max = 1.0;
  double r_min = 0.1;
  double r_max = 96000.0;
  double p_init = 1e-6;
  double r_init = 0.1;

  double alpha_ratio() const { return alpha2 / alpha1; }
  void validate() const;
};

struct Strategy {
  double power = 0.0;
  double rate = 0.0;
};

// k1 = k', k2 = k' k W for the unpriced utility.
struct UtilityParamsBase {
  double k1 = 1.0;
  double k2 = 1e6;
};

template <typename Scalar>
Scalar path_gain(Scalar distance, Scalar exponent, Scalar shadowing) {
  using std::pow;
  if (!(distance > Scalar(0)))
    throw DomainError("path_gain: distance must be positive");
  return shadowing / pow(distance, exponent);
}

/// Interference-plus-noise seen by user `i` at one receiver, normalized by
/// the user's own gain to that receiver.
template <typename GainVec, typename PowerVec>
typename GainVec::Scalar effective_interference(const Eigen::MatrixBase<GainVec>& gains,
                                                const Eigen::MatrixBase<PowerVec>& powers,
                                                Eigen::Index i,
                                                typename GainVec::Scalar noise) {
  using Scalar = typename GainVec::Scalar;
  if (i < 0 || i >= gains.size() || gains.size() != powers.size())
    throw DomainError("effective_interference: index or size mismatch");
  if (!(gains(i) > Scalar(0)))
    throw DomainError("effective_interference: own gain must be positive");
  Scalar received = noise;
  for (Eigen::Index j = 0; j < gains.size(); ++j)
    if (j != i) received += gains(j) * powers(j);
  return received / gains(i);
}

template <typename Scalar>
Scalar sinr(Scalar bandwidth, Scalar power, Scalar rate, Scalar r_eff) {
  if (!(rate > Scalar(0))) throw DomainError("sinr: rate must be positive");
  if (!(r_eff > Scalar(0))) throw DomainError("sinr: effective interference must be positive");
  return (bandwidth / rate) * (power / r_eff);
}

inline double sinr(double bandwidth, const Strategy& s, double r_eff) {
  return sinr(bandwidth, s.power, s.rate, r_eff);
}

template <typename Scalar>
Scalar utility_base(Scalar power, Scalar rate, Scalar r_eff, Scalar k1, Scalar k2) {
  using std::log;
  const Scalar arg = k1 * rate + k2 * power / r_eff;
  if (!(arg > Scalar(0))) throw DomainError("utility_base: non-positive log argument");
  return log(arg);
}

inline double utility_base(const Strategy& s, double r_eff, const UtilityParamsBase& k) {
  return utility_base(s.power, s.rate, r_eff, k.k1, k.k2);
}

/// Priced utility with the effective interference folded into both the
/// throughput term and the quadratic cost.
template <typename Scalar>
Scalar utility_priced(Scalar power, Scalar rate, Scalar r_eff, Scalar alpha1, Scalar alpha2,
                      Scalar lambda) {
  using std::log;
  if (!(r_eff > Scalar(0))) throw DomainError("utility_priced: effective interference must be positive");
  const Scalar arg = alpha2 * r_eff * rate + alpha1 * power;
  if (!(arg > Scalar(0))) throw DomainError("utility_priced: non-positive log argument");
  const Scalar cost = (alpha2 / alpha1) * r_eff * rate * rate + (alpha1 / alpha2) * power * power / r_eff;
  return log(arg) - lambda / Scalar(2) * cost;
}

inline double utility_priced(const Strategy& s, double r_eff, const UserParams& u) {
  return utility_priced(s.power, s.rate, r_eff, u.alpha1, u.alpha2, u.lambda);
}

// Partial derivatives of utility_priced with respect to (power, rate).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> utility_priced_gradient(Scalar power, Scalar rate, Scalar r_eff,
                                                    Scalar alpha1, Scalar alpha2, Scalar lambda) {
  const Scalar s = alpha1 * power + alpha2 * r_eff * rate;
  Eigen::Matrix<Scalar, 2, 1> g;
  g(0) = alpha1 / s - lambda * (alpha1 / alpha2) * power / r_eff;
  g(1) = alpha2 * r_eff / s - lambda * (alpha2 / alpha1) * r_eff * rate;
  return g;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> utility_priced_hessian(Scalar power, Scalar rate, Scalar r_eff,
                                                   Scalar alpha1, Scalar alpha2, Scalar lambda) {
  const Scalar s = alpha1 * power + alpha2 * r_eff * rate;
  const Scalar s2 = s * s;
  Eigen::Matrix<Scalar, 2, 2> h;
  h(0, 0) = -alpha1 * alpha1 / s2 - lambda * (alpha1 / alpha2) / r_eff;
  h(1, 1) = -(alpha2 * r_eff) * (alpha2 * r_eff) / s2 - lambda * (alpha2 / alpha1) * r_eff;
  h(0, 1) = h(1, 0) = -alpha1 * alpha2 * r_eff / s2;
  return h;
}

template <typename Scalar>
Scalar target_sinr(Scalar alpha1, Scalar alpha2, Scalar bandwidth) {
  if (!(alpha1 > Scalar(0) && alpha2 > Scalar(0) && bandwidth > Scalar(0)))
    throw DomainError("target_sinr: inputs must be positive");
  return (alpha2 / alpha1) * bandwidth;
}

inline double target_sinr(const UserParams& u, double bandwidth) {
  return target_sinr(u.alpha1, u.alpha2, bandwidth);
}

// alpha2/alpha1 that makes `target` the equilibrium SINR.
template <typename Scalar>
Scalar alpha_ratio_for_target(Scalar target, Scalar bandwidth) {
  if (!(target > Scalar(0) && bandwidth > Scalar(0)))
    throw DomainError("alpha_ratio_for_target: inputs must be positive");
  return target / bandwidth;
}

// Effective interference of every user at every station, station x user.
Matrix effective_interference_matrix(const Matrix& gains, const Vector& powers, double noise);

}  // namespace jrpc
