#ifndef BPSCHED_EXACT_HPP
#define BPSCHED_EXACT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bpsched/messages.hpp"
#include "bpsched/mrf.hpp"

namespace bpsched {

/// Multivariate table over an ordered scope of variables, last variable
/// fastest. Intermediate representation for variable elimination.
struct Factor {
  std::vector<vertex_id> scope;   // strictly increasing
  std::vector<uint32_t> cards;    // cardinality per scope entry
  std::vector<double> table;      // size = product of cards

  static Factor unary_of(const PairwiseMRF& graph, vertex_id v);
  static Factor pairwise_of(const PairwiseMRF& graph, edge_id e);

  /// Pointwise product over the union scope.
  Factor product(const Factor& other) const;

  /// Sums out one variable of the scope.
  Factor sum_out(vertex_id v) const;

  size_t size() const { return table.size(); }
};

/// Exact marginals by enumerating every joint assignment. Guarded to joint
/// state spaces of at most 2^26; throws model_error beyond that.
BeliefTable brute_force_marginals(const PairwiseMRF& graph);

struct VeOptions {
  size_t max_table_entries = size_t{1} << 28; // abort instead of thrashing
};

/// Exact marginals by variable elimination along `order` (a permutation of
/// the vertices); each query vertex skips itself in the order. Throws
/// model_error when an intermediate factor would exceed the table guard.
BeliefTable variable_elimination(const PairwiseMRF& graph, std::span<const vertex_id> order,
                                 const VeOptions& options = {});

/// Greedy minimum-degree elimination order on the induced graph, ties by
/// lower vertex id.
std::vector<vertex_id> min_degree_order(const PairwiseMRF& graph);

/// KL(p || q) in nats, with 0 * ln(0/q) = 0. Throws std::invalid_argument on
/// length mismatch or when q lacks support where p is positive.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Mean over vertices of kl_divergence(exact_v, approx_v).
double mean_vertex_kl(const BeliefTable& exact, const BeliefTable& approx);

} // namespace bpsched

#endif
