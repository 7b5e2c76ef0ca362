#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace aircomp {

/// Random stream used by every stochastic operation. Callers own it and pass
/// it explicitly; nothing in the library keeps a global generator.
using Rng = std::mt19937_64;

/// Circularly symmetric complex Gaussian with unit variance, CN(0, 1).
std::complex<double> complex_normal(Rng& rng);

/// Hash-derived child seed. The mix is BLAKE2b over the little-endian words,
/// so seeds for neighbouring (master, value, index) tuples are unrelated.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> words);

/// Stable 64-bit tag for a label, used to split streams by purpose.
std::uint64_t label_tag(std::string_view label);

/// 64-bit digest of raw bytes (BLAKE2b, truncated).
std::uint64_t digest_bytes(std::span<const unsigned char> bytes);

}  // namespace aircomp
