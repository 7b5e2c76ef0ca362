#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aircomp/channel.hpp"
#include "aircomp/random.hpp"

namespace aircomp {

/// Raised when a beamformer is (numerically) orthogonal to some channel, so
/// the transmit scalars or the feasibility rescale are undefined.
class DegenerateChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-device power limit P and receiver noise power sigma^2, both in watts.
struct LinkBudget {
  double power_limit = 1.0;
  double noise_power = 1e-13;

  void validate() const;
};

struct TransmitDesign {
  Eigen::VectorXcd w;  // per-device transmit scalars
  double eta = 0.0;    // denoising factor
};

enum class SolveStatus { ok, iteration_cap, sdp_inaccurate };

const char* to_string(SolveStatus status);

struct SolverDiagnostics {
  std::string solver;
  SolveStatus status = SolveStatus::ok;
  int iterations = 0;
  // ||m||^2 of the feasible (tight) iterate, one entry per accepted iterate,
  // starting with the initial point for the SCA solvers.
  std::vector<double> objective_trace;
  double solve_seconds = 0.0;  // total, including initialization
  double init_seconds = 0.0;   // SDR initialization share (SCA variants)
  double sdp_objective = 0.0;  // relaxation value in units of ||m||^2
  double sdp_gap = 0.0;
  int sdp_iterations = 0;
  double rank_ratio = 0.0;  // lambda_2 / lambda_1 of the relaxed solution
  std::vector<std::string> warnings;
  // Beamformers m^(t), t >= 1, when SolverOptions::record_iterates is set.
  std::vector<Eigen::VectorXcd> iterates;
};

struct BeamformingSolution {
  Eigen::VectorXcd m;
  std::optional<Eigen::VectorXcd> a;  // weights with m = H a (reduced solvers)
  TransmitDesign design;
  double mse = 0.0;
  SolverDiagnostics diagnostics;
};

/// |m^H v_k| for every column v_k.
Eigen::VectorXd effective_gains(const Eigen::VectorXcd& m,
                                const Eigen::MatrixXcd& vectors);

/// min_k |m^H v_k|^2.
double min_gain_squared(const Eigen::VectorXcd& m, const Eigen::MatrixXcd& vectors);

/// m / min_k |m^H v_k| so that the smallest constraint is met with equality.
/// Throws DegenerateChannelError when some gain is zero up to 1e-12 relative.
Eigen::VectorXcd rescale_to_constraints(const Eigen::VectorXcd& m,
                                        const Eigen::MatrixXcd& vectors);

Eigen::VectorXcd feasibility_rescale(const Eigen::VectorXcd& m,
                                     const ChannelSet& channels);

/// Closed-form transmit scalars w_k = sqrt(eta) conj(m^H h_k) / |m^H h_k|^2,
/// which phase-align every device at the receiver.
Eigen::VectorXcd transmit_scalars(const Eigen::VectorXcd& m,
                                  const ChannelSet& channels, double eta);

/// eta = P min_k |m^H h_k|^2, the largest factor the power limit allows.
double denoising_factor(const Eigen::VectorXcd& m, const ChannelSet& channels,
                        double power_limit);

/// Both closed forms at once.
TransmitDesign design_transmit(const Eigen::VectorXcd& m,
                               const ChannelSet& channels, double power_limit);

/// ||m||^2 sigma^2 / (P min_k |m^H h_k|^2). Empty when the beamformer is
/// orthogonal to a channel, i.e. the MSE is unbounded.
std::optional<double> analytic_mse(const Eigen::VectorXcd& m,
                                   const ChannelSet& channels,
                                   const LinkBudget& link);

/// MSE for arbitrary transmit scalars and denoising factor.
double general_mse(const Eigen::VectorXcd& m, const Eigen::VectorXcd& w,
                   double eta, const ChannelSet& channels, double noise_power);

/// Fills design and mse for a beamformer, rescaling it onto the constraint
/// surface first.
BeamformingSolution make_solution(const Eigen::VectorXcd& m,
                                  const ChannelSet& channels,
                                  const LinkBudget& link);

/// Monte Carlo estimate of E|g_hat - g|^2. Symbols are i.i.d. CN(0, 1),
/// noise is CN(0, sigma^2 I). Samples are drawn in fixed-size blocks, each
/// from its own stream seeded by one draw of `rng`, and reduced in order.
double simulate_transmission(const BeamformingSolution& solution,
                             const ChannelSet& channels, double noise_power,
                             int num_samples, Rng& rng);

}  // namespace aircomp
