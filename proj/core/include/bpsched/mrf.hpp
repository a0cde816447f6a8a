#ifndef BPSCHED_MRF_HPP
#define BPSCHED_MRF_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace bpsched {

using vertex_id = uint32_t;
using edge_id = uint32_t;          // undirected edge index
using directed_edge_id = uint32_t; // 2e = low->high, 2e+1 = high->low

struct DirectedEdge {
  vertex_id source;
  vertex_id target;
  edge_id undirected;
};

/// Reverse of a directed edge: the two directions of undirected edge e are
/// 2e and 2e+1, so flipping the low bit flips the direction.
constexpr directed_edge_id reverse_edge(directed_edge_id d) { return d ^ 1u; }

/// A discrete pairwise Markov random field. Immutable after construction and
/// safe to share across threads.
///
/// Vertices carry a strictly positive unary potential over their states.
/// Each undirected edge (i, j) with i < j carries a strictly positive
/// |A_i| x |A_j| pairwise potential stored row-major. Undirected edge e
/// induces directed edges 2e (i->j) and 2e+1 (j->i).
class PairwiseMRF {
public:
  struct EdgeSpec {
    vertex_id i;
    vertex_id j;
    std::vector<double> table; // row-major |A_i| x |A_j|
  };

  uint32_t num_vertices() const { return static_cast<uint32_t>(cardinalities_.size()); }
  uint32_t num_edges() const { return static_cast<uint32_t>(edge_endpoints_.size()); }
  uint32_t num_directed_edges() const { return 2 * num_edges(); }

  uint32_t cardinality(vertex_id v) const { return cardinalities_[v]; }
  uint32_t max_cardinality() const { return max_cardinality_; }

  std::span<const double> unary(vertex_id v) const {
    return {unary_values_.data() + unary_offsets_[v], cardinalities_[v]};
  }

  std::pair<vertex_id, vertex_id> edge_endpoints(edge_id e) const { return edge_endpoints_[e]; }

  /// Row-major |A_i| x |A_j| table of undirected edge e, i < j.
  std::span<const double> pairwise(edge_id e) const {
    const auto [i, j] = edge_endpoints_[e];
    return {pairwise_values_.data() + pairwise_offsets_[e],
            static_cast<size_t>(cardinalities_[i]) * cardinalities_[j]};
  }

  const DirectedEdge& directed_edge(directed_edge_id d) const { return directed_edges_[d]; }

  /// Directed edges targeting v, in edge-id order. The messages consumed by
  /// any update at v come from this list.
  std::span<const directed_edge_id> incoming(vertex_id v) const {
    return {adjacency_.data() + adjacency_offsets_[v],
            adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
  }

  uint32_t degree(vertex_id v) const {
    return adjacency_offsets_[v + 1] - adjacency_offsets_[v];
  }

private:
  friend PairwiseMRF build_graph(std::vector<uint32_t> cardinalities,
                                 std::vector<std::vector<double>> unary_tables,
                                 std::vector<EdgeSpec> edges);

  std::vector<uint32_t> cardinalities_;
  std::vector<size_t> unary_offsets_;
  std::vector<double> unary_values_;
  std::vector<std::pair<vertex_id, vertex_id>> edge_endpoints_;
  std::vector<size_t> pairwise_offsets_;
  std::vector<double> pairwise_values_;
  std::vector<DirectedEdge> directed_edges_;
  std::vector<size_t> adjacency_offsets_; // CSR over incoming directed edges
  std::vector<directed_edge_id> adjacency_;
  uint32_t max_cardinality_ = 0;
};

/// Validates and assembles a PairwiseMRF.
///
/// Edge specs must satisfy i < j and are assigned undirected edge ids in
/// input order. Throws model_error on dimension mismatches, non-positive
/// potential entries, self loops, duplicate edges, or misordered endpoints.
PairwiseMRF build_graph(std::vector<uint32_t> cardinalities,
                        std::vector<std::vector<double>> unary_tables,
                        std::vector<PairwiseMRF::EdgeSpec> edges);

} // namespace bpsched

#endif
