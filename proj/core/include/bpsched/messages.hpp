#ifndef BPSCHED_MESSAGES_HPP
#define BPSCHED_MESSAGES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bpsched/mrf.hpp"

namespace bpsched {

/// One probability vector per directed edge, length |A_target|, each
/// L1-normalized. Double-buffered: bulk steps write into a shadow buffer and
/// commit it once the whole step has been computed, so every read within a
/// step sees the pre-step snapshot.
class MessageStore {
public:
  MessageStore() = default;

  uint32_t num_messages() const { return static_cast<uint32_t>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  uint64_t generation() const { return generation_; }

  std::span<const double> view(directed_edge_id d) const {
    return {values_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }

  uint32_t length(directed_edge_id d) const {
    return static_cast<uint32_t>(offsets_[d + 1] - offsets_[d]);
  }

  /// Overwrites message d in the live buffer. Used when the new values were
  /// all computed against a consistent snapshot (Jacobi bulk steps copy
  /// precomputed candidates through here).
  void write(directed_edge_id d, std::span<const double> values);

  /// Shadow-buffer access for Gauss-Seidel splash updates: writes land in the
  /// shadow, reads of shadowed edges must go through shadow_view.
  std::span<double> shadow_slot(directed_edge_id d) {
    return {shadow_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }
  std::span<const double> shadow_view(directed_edge_id d) const {
    return {shadow_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }

  /// Copies the listed shadow slots into the live buffer and bumps the
  /// generation counter.
  void commit_shadow(std::span<const directed_edge_id> written);

  void bump_generation() { ++generation_; }

private:
  friend MessageStore init_messages(const PairwiseMRF& graph);

  std::vector<size_t> offsets_; // num_messages + 1 entries
  std::vector<double> values_;
  std::vector<double> shadow_;
  uint64_t generation_ = 0;
};

/// Uniform initial messages: each directed edge gets the uniform distribution
/// over its target's states.
MessageStore init_messages(const PairwiseMRF& graph);

/// L1-normalizes `v` in place. Throws numeric_error when the total mass is
/// below 1e-300 (numeric collapse).
void normalize_in_place(std::span<double> v);

/// Value-returning form of normalize_in_place.
std::vector<double> normalize(std::vector<double> v);

/// Max-norm distance between a candidate message and the current one.
/// Throws std::invalid_argument on length mismatch.
double residual(std::span<const double> candidate, std::span<const double> current);

/// Sum-product update for directed edge d = (i -> j):
///   out(x_j) ∝ sum_{x_i} psi_ij(x_i, x_j) * psi_i(x_i) * prod_{k in G_i \ j} m_{k->i}(x_i)
/// normalized to unit mass. Pure: the store is not modified and identical
/// inputs give bitwise-identical outputs.
std::vector<double> update_message(const PairwiseMRF& graph, const MessageStore& messages,
                                   directed_edge_id d);

/// Per-vertex probability vectors (approximate marginals).
class BeliefTable {
public:
  BeliefTable() = default;
  explicit BeliefTable(const std::vector<uint32_t>& cardinalities);

  uint32_t num_vertices() const { return static_cast<uint32_t>(offsets_.empty() ? 0 : offsets_.size() - 1); }

  std::span<const double> at(vertex_id v) const {
    return {values_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<double> at(vertex_id v) {
    return {values_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

private:
  std::vector<size_t> offsets_;
  std::vector<double> values_;
};

/// Belief at one vertex: normalize(psi_i(x_i) * prod_{k in G_i} m_{k->i}(x_i)).
std::vector<double> compute_belief(const PairwiseMRF& graph, const MessageStore& messages,
                                   vertex_id v);

/// Beliefs at every vertex.
BeliefTable compute_beliefs(const PairwiseMRF& graph, const MessageStore& messages);

namespace detail {

/// Core update kernel, templated over the message view so splash updates can
/// read through an overlay. `scratch` must hold at least max_cardinality
/// doubles. Writes the normalized update into `out`.
template <class View>
void update_message_into(const PairwiseMRF& graph, const View& messages, directed_edge_id d,
                         std::span<double> out, std::span<double> scratch) {
  const DirectedEdge& de = graph.directed_edge(d);
  const uint32_t ci = graph.cardinality(de.source);
  const uint32_t cj = graph.cardinality(de.target);

  // prod(x_i) = psi_i(x_i) * product of inbound messages at the source,
  // excluding the one coming back from the target.
  const std::span<const double> unary = graph.unary(de.source);
  double* prod = scratch.data();
  for (uint32_t x = 0; x < ci; ++x) prod[x] = unary[x];
  const directed_edge_id excluded = reverse_edge(d);
  for (directed_edge_id in : graph.incoming(de.source)) {
    if (in == excluded) continue;
    const std::span<const double> m = messages.view(in);
    for (uint32_t x = 0; x < ci; ++x) prod[x] *= m[x];
  }

  const std::span<const double> table = graph.pairwise(de.undirected);
  if ((d & 1u) == 0) {
    // low -> high: table is |A_source| x |A_target|, contract over rows.
    for (uint32_t xj = 0; xj < cj; ++xj) {
      double acc = 0.0;
      for (uint32_t xi = 0; xi < ci; ++xi) acc += table[static_cast<size_t>(xi) * cj + xj] * prod[xi];
      out[xj] = acc;
    }
  } else {
    // high -> low: table is |A_target| x |A_source|, contract over columns.
    for (uint32_t xj = 0; xj < cj; ++xj) {
      double acc = 0.0;
      const double* row = table.data() + static_cast<size_t>(xj) * ci;
      for (uint32_t xi = 0; xi < ci; ++xi) acc += row[xi] * prod[xi];
      out[xj] = acc;
    }
  }
  normalize_in_place(out.subspan(0, cj));
}

} // namespace detail
} // namespace bpsched

#endif
