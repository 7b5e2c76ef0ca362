#include "aircomp/random.hpp"

#include <sodium.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace aircomp {
namespace {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) {
    throw std::runtime_error("libsodium initialization failed");
  }
}

std::uint64_t blake2b_u64(const unsigned char* data, std::size_t size) {
  ensure_sodium();
  std::array<unsigned char, 8> out{};
  crypto_generichash(out.data(), out.size(), data, size, nullptr, 0);
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | out[i];
  return value;
}

void append_le(std::vector<unsigned char>& buffer, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) buffer.push_back(static_cast<unsigned char>(word >> (8 * i)));
}

}  // namespace

std::complex<double> complex_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> words) {
  std::vector<unsigned char> buffer;
  buffer.reserve(8 * (1 + words.size()));
  append_le(buffer, master);
  for (const auto w : words) append_le(buffer, w);
  return blake2b_u64(buffer.data(), buffer.size());
}

std::uint64_t label_tag(std::string_view label) {
  return blake2b_u64(reinterpret_cast<const unsigned char*>(label.data()),
                     label.size());
}

std::uint64_t digest_bytes(std::span<const unsigned char> bytes) {
  return blake2b_u64(bytes.data(), bytes.size());
}

}  // namespace aircomp
