#ifndef BPSCHED_RNG_HPP
#define BPSCHED_RNG_HPP

#include <random>

namespace bpsched {

/// Next double in [0, 1) from the top 53 bits of the generator output.
/// mt19937_64 has a fully specified sequence, so seeded draws are identical
/// across platforms (std::uniform_real_distribution is not).
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace bpsched

#endif
