#include "copula_lab/rng.hpp"

#include <cmath>

namespace copula_lab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

double uniform_open(Rng& rng) {
  // 53 random bits mapped to the midpoints of a 2^-53 grid: never 0, never 1.
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double gamma_variate(Rng& rng, double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double beta_variate(Rng& rng, double a, double b) {
  const double x = gamma_variate(rng, a, 1.0);
  const double y = gamma_variate(rng, b, 1.0);
  return x / (x + y);
}

double log_gamma_variate(Rng& rng, double shape, double rate) {
  if (shape >= 1.0) return std::log(gamma_variate(rng, shape, rate));
  // G(a) = G(a+1) * U^(1/a)
  const double g = gamma_variate(rng, shape + 1.0, rate);
  return std::log(g) + std::log(uniform_open(rng)) / shape;
}

}  // namespace copula_lab
