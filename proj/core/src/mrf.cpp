#include "bpsched/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "bpsched/errors.hpp"

namespace bpsched {

namespace {

void check_positive_table(std::span<const double> table, const std::string& what) {
  for (double v : table) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw model_error(what + " entries must be strictly positive and finite");
    }
  }
}

} // namespace

PairwiseMRF build_graph(std::vector<uint32_t> cardinalities,
                        std::vector<std::vector<double>> unary_tables,
                        std::vector<PairwiseMRF::EdgeSpec> edges) {
  const uint32_t num_vertices = static_cast<uint32_t>(cardinalities.size());
  if (unary_tables.size() != num_vertices) {
    throw model_error("expected one unary table per vertex, got " +
                      std::to_string(unary_tables.size()) + " for " +
                      std::to_string(num_vertices) + " vertices");
  }

  PairwiseMRF g;
  g.cardinalities_ = std::move(cardinalities);
  g.unary_offsets_.reserve(num_vertices + 1);
  g.unary_offsets_.push_back(0);
  for (vertex_id v = 0; v < num_vertices; ++v) {
    const uint32_t card = g.cardinalities_[v];
    if (card == 0) {
      throw model_error("vertex " + std::to_string(v) + " has cardinality 0");
    }
    if (unary_tables[v].size() != card) {
      throw model_error("unary table of vertex " + std::to_string(v) + " has " +
                        std::to_string(unary_tables[v].size()) + " entries, expected " +
                        std::to_string(card));
    }
    check_positive_table(unary_tables[v], "unary(" + std::to_string(v) + ")");
    g.unary_values_.insert(g.unary_values_.end(), unary_tables[v].begin(), unary_tables[v].end());
    g.unary_offsets_.push_back(g.unary_values_.size());
    g.max_cardinality_ = std::max(g.max_cardinality_, card);
  }

  std::set<std::pair<vertex_id, vertex_id>> seen;
  g.edge_endpoints_.reserve(edges.size());
  g.pairwise_offsets_.reserve(edges.size() + 1);
  g.pairwise_offsets_.push_back(0);
  g.directed_edges_.reserve(2 * edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    PairwiseMRF::EdgeSpec& spec = edges[e];
    if (spec.i >= num_vertices || spec.j >= num_vertices) {
      throw model_error("edge " + std::to_string(e) + " references a vertex out of range");
    }
    if (spec.i == spec.j) {
      throw model_error("edge " + std::to_string(e) + " is a self-loop on vertex " +
                        std::to_string(spec.i));
    }
    if (spec.i > spec.j) {
      throw model_error("edge " + std::to_string(e) + " endpoints must satisfy i < j");
    }
    if (!seen.insert({spec.i, spec.j}).second) {
      throw model_error("duplicate edge (" + std::to_string(spec.i) + ", " +
                        std::to_string(spec.j) + ")");
    }
    const size_t expected =
        static_cast<size_t>(g.cardinalities_[spec.i]) * g.cardinalities_[spec.j];
    if (spec.table.size() != expected) {
      throw model_error("pairwise table of edge (" + std::to_string(spec.i) + ", " +
                        std::to_string(spec.j) + ") has " + std::to_string(spec.table.size()) +
                        " entries, expected " + std::to_string(expected));
    }
    check_positive_table(spec.table,
                         "pairwise(" + std::to_string(spec.i) + "," + std::to_string(spec.j) + ")");

    g.edge_endpoints_.emplace_back(spec.i, spec.j);
    g.pairwise_values_.insert(g.pairwise_values_.end(), spec.table.begin(), spec.table.end());
    g.pairwise_offsets_.push_back(g.pairwise_values_.size());
    g.directed_edges_.push_back({spec.i, spec.j, static_cast<edge_id>(e)}); // 2e
    g.directed_edges_.push_back({spec.j, spec.i, static_cast<edge_id>(e)}); // 2e+1
  }

  // CSR of incoming directed edges per vertex, in edge-id order.
  std::vector<uint32_t> in_degree(num_vertices, 0);
  for (const DirectedEdge& de : g.directed_edges_) ++in_degree[de.target];
  g.adjacency_offsets_.assign(num_vertices + 1, 0);
  for (vertex_id v = 0; v < num_vertices; ++v) {
    g.adjacency_offsets_[v + 1] = g.adjacency_offsets_[v] + in_degree[v];
  }
  g.adjacency_.resize(g.directed_edges_.size());
  std::vector<size_t> cursor(g.adjacency_offsets_.begin(), g.adjacency_offsets_.end() - 1);
  for (directed_edge_id d = 0; d < g.directed_edges_.size(); ++d) {
    g.adjacency_[cursor[g.directed_edges_[d].target]++] = d;
  }
  return g;
}

} // namespace bpsched
