#pragma once

#include <Eigen/Dense>

#include <vector>

#include "aircomp/random.hpp"

namespace aircomp {

using Vec3 = Eigen::Vector3d;

/// Device placement and array layout. Devices are dropped uniformly over a
/// horizontal disk; the AP carries a uniform linear array along the global
/// x-axis with element spacing given in wavelengths.
struct GeometryConfig {
  Vec3 ap_position{0.0, 0.0, 20.0};
  Vec3 region_center{120.0, 20.0, 0.0};
  double region_radius = 20.0;  // meters
  double antenna_spacing = 0.5;  // wavelengths

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Large-scale fading t0 * (d / d0)^-alpha plus Rician small-scale fading.
/// All values are linear; dB conversion happens in the config layer. A
/// rician_beta of +infinity gives a pure line-of-sight channel.
struct FadingConfig {
  double t0 = 1e-3;
  double d0 = 1.0;
  double alpha = 3.0;
  double rician_beta = 3.0;  // linear power ratio LOS / scattered

  void validate() const;
};

/// Channel matrix with one column per device plus the geometry that produced
/// it. Positions may be empty for channels built directly from a matrix.
struct ChannelSet {
  Eigen::MatrixXcd h;
  std::vector<Vec3> positions;
  Eigen::VectorXd distances;
  Eigen::VectorXd large_scale;

  int antennas() const { return static_cast<int>(h.rows()); }
  int devices() const { return static_cast<int>(h.cols()); }

  /// Wraps a bare N x K matrix. Throws if any column is zero or non-finite.
  static ChannelSet from_matrix(Eigen::MatrixXcd h);

  /// Checks the column and (when present) geometry invariants.
  void validate() const;
  void validate(const Vec3& ap_position) const;

  /// Digest of the matrix bytes, used to verify channel pairing in sweeps.
  std::uint64_t digest() const;
};

std::vector<Vec3> sample_positions(const GeometryConfig& geometry, int count,
                                   Rng& rng);

/// t0 * (distance / d0)^-alpha. Throws for distance <= 0.
double path_loss(double distance, const FadingConfig& fading);

/// exp(j 2 pi spacing n sin(azimuth)), n = 0..N-1.
Eigen::VectorXcd ula_response(int num_antennas, double azimuth, double spacing);

/// Azimuth of `position` seen from the array, measured in the horizontal
/// plane from broadside (the y-axis) towards the array axis (the x-axis).
double device_azimuth(const Vec3& ap_position, const Vec3& position);

ChannelSet sample_channel(const GeometryConfig& geometry,
                          const FadingConfig& fading, int num_antennas,
                          int num_devices, Rng& rng);

}  // namespace aircomp
