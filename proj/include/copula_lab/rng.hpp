#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace copula_lab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a repetition stream keyed by (master seed, study id, cell id, repetition).
/// The result does not depend on scheduling, so parallel runs reproduce serial ones.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(stream_seed(master, keys));
}

/// Uniform on the open interval (0,1).
double uniform_open(Rng& rng);
double standard_normal(Rng& rng);
double gamma_variate(Rng& rng, double shape, double rate);
double beta_variate(Rng& rng, double a, double b);

/// log of a Gamma(shape, rate) draw, accurate when shape is small and the draw
/// underflows on the natural scale.
double log_gamma_variate(Rng& rng, double shape, double rate);

}  // namespace copula_lab
