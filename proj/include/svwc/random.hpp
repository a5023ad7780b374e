#pragma once

#include <cstdint>
#include <random>

namespace svwc {

/// splitmix64 finalizer over master ^ (golden-ratio * index). Injective in
/// `index` for a fixed master, since both steps are bijections on 64 bits.
constexpr std::uint64_t
DeriveSeed (std::uint64_t master, std::uint64_t index)
{
  std::uint64_t z = master ^ (index * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * Thin wrapper around std::mt19937_64. Every stochastic operation in the
 * library takes one of these by reference and documents the draws it makes;
 * results are reproducible for a given libstdc++ but not across standard
 * library implementations.
 */
class Rng
{
public:
  explicit Rng (std::uint64_t seed)
    : m_engine (seed)
  {
  }

  double Uniform () { return m_unit (m_engine); }
  double Uniform (double lo, double hi) { return lo + (hi - lo) * Uniform (); }
  double Normal () { return m_normal (m_engine); }
  double Normal (double mean, double sigma) { return mean + sigma * Normal (); }

  /// Uniform integer in [0, n). n must be >= 1.
  std::uint64_t Index (std::uint64_t n)
  {
    return std::uniform_int_distribution<std::uint64_t> (0, n - 1) (m_engine);
  }

  /// Poisson variate; a zero mean returns 0 without consuming a draw.
  int Poisson (double mean)
  {
    if (!(mean > 0.0))
      {
        return 0;
      }
    return std::poisson_distribution<int> (mean) (m_engine);
  }

  std::mt19937_64& Engine () { return m_engine; }

private:
  std::mt19937_64 m_engine;
  std::uniform_real_distribution<double> m_unit{0.0, 1.0};
  std::normal_distribution<double> m_normal{0.0, 1.0};
};

} // namespace svwc
