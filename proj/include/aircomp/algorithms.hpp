#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "aircomp/channel.hpp"
#include "aircomp/core.hpp"
#include "aircomp/random.hpp"
#include "aircomp/sdp.hpp"

namespace aircomp {

/// Raised when the relaxation cannot be solved (e.g. detected infeasible).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double sca_tolerance = 1e-5;  // relative objective decrease that stops SCA
  int sca_max_iterations = 100;
  SdpOptions sdp;
  int randomization_candidates = 100;
  bool record_iterates = false;

  void validate() const;
};

/// Weight-domain data for beamformers restricted to span(H): f_k = H^H h_k
/// (column k of f) and D = H^H H. Note f_k = D e_k.
struct ReducedProblem {
  Eigen::MatrixXcd f;
  Eigen::MatrixXcd d;
};

ReducedProblem reduce(const Eigen::MatrixXcd& h);
inline ReducedProblem reduce(const ChannelSet& channels) { return reduce(channels.h); }

enum class Algorithm { direct_sdr, direct_sca, sdr_opt, sca_opt };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::direct_sdr, Algorithm::direct_sca,
                                               Algorithm::sdr_opt, Algorithm::sca_opt};

/// "direct-sdr", "direct-sca", "sdr-opt", "sca-opt".
const char* algorithm_name(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// N x N relaxation of min ||m||^2 s.t. |m^H h_k|^2 >= 1, followed by
/// Gaussian randomization.
BeamformingSolution direct_sdr(const ChannelSet& channels, const LinkBudget& link,
                               const SolverOptions& options, Rng& rng);

/// SCA on the N-dimensional beamformer from a feasible starting point. Each
/// step solves the convexified problem through its K-dimensional dual.
/// Throws std::invalid_argument if `init` violates min_k |init^H h_k|^2 >= 1.
BeamformingSolution direct_sca(const ChannelSet& channels, const Eigen::VectorXcd& init,
                               const LinkBudget& link, const SolverOptions& options);

/// Direct SCA initialized with the direct SDR solution; timings include the
/// initialization (init_seconds holds the SDR share).
BeamformingSolution direct_sca_from_sdr(const ChannelSet& channels, const LinkBudget& link,
                                        const SolverOptions& options, Rng& rng);

/// K x K relaxation over the weights a with m = H a.
BeamformingSolution sdr_opt(const ChannelSet& channels, const LinkBudget& link,
                            const SolverOptions& options, Rng& rng);

/// Weight-domain SCA initialized from sdr_opt.
BeamformingSolution sca_opt(const ChannelSet& channels, const LinkBudget& link,
                            const SolverOptions& options, Rng& rng);

BeamformingSolution run_algorithm(Algorithm algorithm, const ChannelSet& channels,
                                  const LinkBudget& link, const SolverOptions& options,
                                  Rng& rng);

}  // namespace aircomp
