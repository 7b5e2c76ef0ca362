#include "aircomp/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aircomp {
namespace {

constexpr double kDegenerateGain = 1e-12;
constexpr int kSimulationBlock = 8192;

// Index of a device whose gain is zero relative to ||m|| ||v_k||, or -1.
Eigen::Index degenerate_index(const Eigen::VectorXcd& m,
                              const Eigen::MatrixXcd& vectors,
                              const Eigen::VectorXd& gains) {
  const double m_norm = m.norm();
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    if (!(gains[k] >= kDegenerateGain * m_norm * vectors.col(k).norm()) ||
        gains[k] == 0.0) {
      return k;
    }
  }
  return -1;
}

void check_sizes(const Eigen::VectorXcd& m, const Eigen::MatrixXcd& vectors) {
  if (m.size() != vectors.rows()) {
    throw std::invalid_argument("beamformer length " + std::to_string(m.size()) +
                                " does not match channel dimension " +
                                std::to_string(vectors.rows()));
  }
}

}  // namespace

void LinkBudget::validate() const {
  if (!(std::isfinite(power_limit) && power_limit > 0)) {
    throw std::invalid_argument("link: power_limit must be > 0");
  }
  if (!(std::isfinite(noise_power) && noise_power > 0)) {
    throw std::invalid_argument("link: noise_power must be > 0");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::ok:
      return "ok";
    case SolveStatus::iteration_cap:
      return "iteration-cap";
    case SolveStatus::sdp_inaccurate:
      return "sdp-inaccurate";
  }
  return "unknown";
}

Eigen::VectorXd effective_gains(const Eigen::VectorXcd& m,
                                const Eigen::MatrixXcd& vectors) {
  check_sizes(m, vectors);
  return (vectors.adjoint() * m).cwiseAbs();
}

double min_gain_squared(const Eigen::VectorXcd& m, const Eigen::MatrixXcd& vectors) {
  const double g = effective_gains(m, vectors).minCoeff();
  return g * g;
}

Eigen::VectorXcd rescale_to_constraints(const Eigen::VectorXcd& m,
                                        const Eigen::MatrixXcd& vectors) {
  const Eigen::VectorXd gains = effective_gains(m, vectors);
  if (const auto k = degenerate_index(m, vectors, gains); k >= 0) {
    throw DegenerateChannelError("beamformer is orthogonal to channel " +
                                 std::to_string(k));
  }
  return m / gains.minCoeff();
}

Eigen::VectorXcd feasibility_rescale(const Eigen::VectorXcd& m,
                                     const ChannelSet& channels) {
  return rescale_to_constraints(m, channels.h);
}

Eigen::VectorXcd transmit_scalars(const Eigen::VectorXcd& m,
                                  const ChannelSet& channels, double eta) {
  if (!(eta >= 0)) throw std::invalid_argument("transmit_scalars: eta must be >= 0");
  check_sizes(m, channels.h);
  const Eigen::VectorXcd inner = channels.h.adjoint() * m;  // conj(m^H h_k)
  const Eigen::VectorXd gains = inner.cwiseAbs();
  if (const auto k = degenerate_index(m, channels.h, gains); k >= 0) {
    throw DegenerateChannelError("transmit_scalars: zero effective gain for device " +
                                 std::to_string(k));
  }
  // conj(m^H h_k) is exactly h_k^H m.
  return std::sqrt(eta) * inner.cwiseQuotient(gains.cwiseAbs2().cast<std::complex<double>>());
}

double denoising_factor(const Eigen::VectorXcd& m, const ChannelSet& channels,
                        double power_limit) {
  return power_limit * min_gain_squared(m, channels.h);
}

TransmitDesign design_transmit(const Eigen::VectorXcd& m,
                               const ChannelSet& channels, double power_limit) {
  TransmitDesign design;
  design.eta = denoising_factor(m, channels, power_limit);
  design.w = transmit_scalars(m, channels, design.eta);
  return design;
}

std::optional<double> analytic_mse(const Eigen::VectorXcd& m,
                                   const ChannelSet& channels,
                                   const LinkBudget& link) {
  const Eigen::VectorXd gains = effective_gains(m, channels.h);
  if (degenerate_index(m, channels.h, gains) >= 0) return std::nullopt;
  const double min_gain = gains.minCoeff();
  return m.squaredNorm() * link.noise_power /
         (link.power_limit * min_gain * min_gain);
}

double general_mse(const Eigen::VectorXcd& m, const Eigen::VectorXcd& w,
                   double eta, const ChannelSet& channels, double noise_power) {
  if (!(eta > 0)) throw std::invalid_argument("general_mse: eta must be > 0");
  check_sizes(m, channels.h);
  if (w.size() != channels.h.cols()) {
    throw std::invalid_argument("general_mse: w must have one entry per device");
  }
  const double root_eta = std::sqrt(eta);
  const Eigen::VectorXcd effective = (m.adjoint() * channels.h).transpose();
  double total = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    total += std::norm(effective[k] * w[k] / root_eta - 1.0);
  }
  return total + noise_power * m.squaredNorm() / eta;
}

BeamformingSolution make_solution(const Eigen::VectorXcd& m,
                                  const ChannelSet& channels,
                                  const LinkBudget& link) {
  BeamformingSolution solution;
  solution.m = feasibility_rescale(m, channels);
  solution.design = design_transmit(solution.m, channels, link.power_limit);
  solution.mse = *analytic_mse(solution.m, channels, link);
  return solution;
}

double simulate_transmission(const BeamformingSolution& solution,
                             const ChannelSet& channels, double noise_power,
                             int num_samples, Rng& rng) {
  if (num_samples < 1) {
    throw std::invalid_argument("simulate_transmission: num_samples must be >= 1");
  }
  if (!(noise_power >= 0)) {
    throw std::invalid_argument("simulate_transmission: noise_power must be >= 0");
  }
  const auto& design = solution.design;
  const int n = channels.antennas();
  const int k = channels.devices();
  const double inv_root_eta = 1.0 / std::sqrt(design.eta);
  const double noise_scale = std::sqrt(noise_power);
  // m^H h_k w_k, precomputed; the received combination is linear in s and n.
  const Eigen::RowVectorXcd combined =
      (solution.m.adjoint() * channels.h).cwiseProduct(design.w.transpose());

  double total = 0.0;
  Eigen::VectorXcd symbols(k);
  Eigen::VectorXcd noise(n);
  for (int start = 0; start < num_samples; start += kSimulationBlock) {
    Rng block_rng(rng());
    const int count = std::min(kSimulationBlock, num_samples - start);
    double block_total = 0.0;
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < k; ++j) symbols[j] = complex_normal(block_rng);
      for (int j = 0; j < n; ++j) noise[j] = noise_scale * complex_normal(block_rng);
      const std::complex<double> target = symbols.sum();
      const std::complex<double> estimate =
          inv_root_eta * ((combined * symbols)(0) + solution.m.dot(noise));
      block_total += std::norm(estimate - target);
    }
    total += block_total;
  }
  return total / num_samples;
}

}  // namespace aircomp
