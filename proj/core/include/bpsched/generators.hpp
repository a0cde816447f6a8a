#ifndef BPSCHED_GENERATORS_HPP
#define BPSCHED_GENERATORS_HPP

#include <array>
#include <cstdint>
#include <random>

#include "bpsched/mrf.hpp"
#include "bpsched/rng.hpp"

namespace bpsched {

/// N x N grid of binary variables with agreement/disagreement couplings of
/// strength controlled by c.
struct IsingParams {
  uint32_t n = 10;
  double c = 2.0;
  uint64_t seed = 0;
};

struct ChainParams {
  uint32_t length = 100;
  double c = 2.0;
  uint64_t seed = 0;
};

/// 2x2 coupling table for a binary edge: exp(lambda * c) on the diagonal
/// (states agree), exp(-lambda * c) off it.
std::array<double, 4> ising_edge_table(double lambda, double c);

/// Grid benchmark. Vertices are row-major; each vertex gets two unary entries
/// drawn uniform in (0, 1); edges are emitted right-neighbor then
/// down-neighbor per vertex, each with lambda drawn uniform in [-0.5, 0.5).
/// Random stream order: all unaries in vertex order, then one lambda per edge
/// in edge order (exact zeros in the unary draw are redrawn).
PairwiseMRF generate_ising(const IsingParams& params);

/// Path of binary variables, sampled the same way as generate_ising.
PairwiseMRF generate_chain(const ChainParams& params);

} // namespace bpsched

#endif
