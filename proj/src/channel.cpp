#include "aircomp/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aircomp {
namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

void GeometryConfig::validate() const {
  require(ap_position.allFinite(), "geometry: ap_position must be finite");
  require(region_center.allFinite(), "geometry: region_center must be finite");
  require(std::isfinite(region_radius) && region_radius > 0,
          "geometry: region_radius must be > 0");
  require(std::isfinite(antenna_spacing) && antenna_spacing > 0,
          "geometry: antenna_spacing must be > 0");
}

void FadingConfig::validate() const {
  require(std::isfinite(t0) && t0 > 0, "fading: t0 must be > 0 (linear)");
  require(std::isfinite(d0) && d0 > 0, "fading: d0 must be > 0");
  require(std::isfinite(alpha) && alpha > 0, "fading: alpha must be > 0");
  require(!std::isnan(rician_beta) && rician_beta >= 0,
          "fading: rician_beta must be >= 0");
}

ChannelSet ChannelSet::from_matrix(Eigen::MatrixXcd h) {
  ChannelSet set;
  set.h = std::move(h);
  set.validate();
  return set;
}

void ChannelSet::validate() const {
  require(h.rows() >= 1 && h.cols() >= 1, "channel: empty channel matrix");
  require(h.allFinite(), "channel: non-finite channel entries");
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double norm2 = h.col(k).squaredNorm();
    require(std::isfinite(norm2) && norm2 > 0,
            "channel: column " + std::to_string(k) + " is zero");
  }
  if (!positions.empty()) {
    require(static_cast<Eigen::Index>(positions.size()) == h.cols() &&
                distances.size() == h.cols() && large_scale.size() == h.cols(),
            "channel: metadata size does not match device count");
  }
}

void ChannelSet::validate(const Vec3& ap_position) const {
  validate();
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const double expected = (positions[k] - ap_position).norm();
    require(std::abs(distances[k] - expected) <= 1e-9 * expected,
            "channel: distance inconsistent with position for device " +
                std::to_string(k));
  }
}

std::uint64_t ChannelSet::digest() const {
  const auto* bytes = reinterpret_cast<const unsigned char*>(h.data());
  const std::size_t size =
      static_cast<std::size_t>(h.size()) * sizeof(std::complex<double>);
  return digest_bytes({bytes, size});
}

std::vector<Vec3> sample_positions(const GeometryConfig& geometry, int count,
                                   Rng& rng) {
  require(count >= 1, "sample_positions: device count must be >= 1");
  require(std::isfinite(geometry.region_radius) && geometry.region_radius >= 0,
          "sample_positions: region_radius must be >= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> positions;
  positions.reserve(count);
  for (int k = 0; k < count; ++k) {
    // Inverse-CDF radius keeps a fixed number of draws per device.
    const double radius = geometry.region_radius * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    positions.push_back(geometry.region_center +
                        Vec3(radius * std::cos(angle), radius * std::sin(angle), 0.0));
  }
  return positions;
}

double path_loss(double distance, const FadingConfig& fading) {
  require(std::isfinite(distance) && distance > 0,
          "path_loss: distance must be > 0");
  return fading.t0 * std::pow(distance / fading.d0, -fading.alpha);
}

Eigen::VectorXcd ula_response(int num_antennas, double azimuth, double spacing) {
  require(num_antennas >= 1, "ula_response: num_antennas must be >= 1");
  Eigen::VectorXcd response(num_antennas);
  const double phase_step = 2.0 * std::numbers::pi * spacing * std::sin(azimuth);
  for (int n = 0; n < num_antennas; ++n) {
    response[n] = std::polar(1.0, phase_step * n);
  }
  return response;
}

double device_azimuth(const Vec3& ap_position, const Vec3& position) {
  const Vec3 offset = position - ap_position;
  if (offset.x() == 0.0 && offset.y() == 0.0) return 0.0;
  return std::atan2(offset.x(), offset.y());
}

ChannelSet sample_channel(const GeometryConfig& geometry,
                          const FadingConfig& fading, int num_antennas,
                          int num_devices, Rng& rng) {
  require(num_antennas >= 1, "sample_channel: num_antennas must be >= 1");
  require(num_devices >= 1, "sample_channel: num_devices must be >= 1");
  fading.validate();

  ChannelSet set;
  set.positions = sample_positions(geometry, num_devices, rng);
  set.distances.resize(num_devices);
  set.large_scale.resize(num_devices);
  set.h.resize(num_antennas, num_devices);

  double los_weight = 1.0;
  double nlos_weight = 0.0;
  if (!std::isinf(fading.rician_beta)) {
    los_weight = std::sqrt(fading.rician_beta / (1.0 + fading.rician_beta));
    nlos_weight = std::sqrt(1.0 / (1.0 + fading.rician_beta));
  }

  for (int k = 0; k < num_devices; ++k) {
    const double distance = (set.positions[k] - geometry.ap_position).norm();
    set.distances[k] = distance;
    set.large_scale[k] = path_loss(distance, fading);
    const Eigen::VectorXcd los =
        ula_response(num_antennas, device_azimuth(geometry.ap_position, set.positions[k]),
                     geometry.antenna_spacing);
    Eigen::VectorXcd scattered(num_antennas);
    for (int n = 0; n < num_antennas; ++n) scattered[n] = complex_normal(rng);
    set.h.col(k) = std::sqrt(set.large_scale[k]) *
                   (los_weight * los + nlos_weight * scattered);
  }
  set.validate(geometry.ap_position);
  return set;
}

}  // namespace aircomp
