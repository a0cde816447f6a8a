#include "bpsched/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "bpsched/errors.hpp"

namespace bpsched {

namespace {

std::vector<uint32_t> all_cardinalities(const PairwiseMRF& graph) {
  std::vector<uint32_t> cards(graph.num_vertices());
  for (vertex_id v = 0; v < graph.num_vertices(); ++v) cards[v] = graph.cardinality(v);
  return cards;
}

} // namespace

Factor Factor::unary_of(const PairwiseMRF& graph, vertex_id v) {
  const std::span<const double> u = graph.unary(v);
  return {{v}, {graph.cardinality(v)}, {u.begin(), u.end()}};
}

Factor Factor::pairwise_of(const PairwiseMRF& graph, edge_id e) {
  const auto [i, j] = graph.edge_endpoints(e);
  const std::span<const double> t = graph.pairwise(e);
  // scope {i, j} with j fastest matches the row-major |A_i| x |A_j| layout.
  return {{i, j}, {graph.cardinality(i), graph.cardinality(j)}, {t.begin(), t.end()}};
}

Factor Factor::product(const Factor& other) const {
  const Factor& a = *this;
  const Factor& b = other;

  Factor out;
  {
    size_t ia = 0;
    size_t ib = 0;
    while (ia < a.scope.size() || ib < b.scope.size()) {
      if (ib == b.scope.size() || (ia < a.scope.size() && a.scope[ia] < b.scope[ib])) {
        out.scope.push_back(a.scope[ia]);
        out.cards.push_back(a.cards[ia]);
        ++ia;
      } else if (ia == a.scope.size() || b.scope[ib] < a.scope[ia]) {
        out.scope.push_back(b.scope[ib]);
        out.cards.push_back(b.cards[ib]);
        ++ib;
      } else {
        out.scope.push_back(a.scope[ia]);
        out.cards.push_back(a.cards[ia]);
        ++ia;
        ++ib;
      }
    }
  }

  size_t total = 1;
  for (uint32_t c : out.cards) total *= c;
  out.table.resize(total);

  // Strides of each operand relative to the union scope, last variable fastest.
  const auto strides_in = [&](const Factor& f) {
    std::vector<size_t> own(f.scope.size());
    size_t s = 1;
    for (size_t i = f.scope.size(); i-- > 0;) {
      own[i] = s;
      s *= f.cards[i];
    }
    std::vector<size_t> mapped(out.scope.size(), 0);
    for (size_t u = 0; u < out.scope.size(); ++u) {
      const auto it = std::lower_bound(f.scope.begin(), f.scope.end(), out.scope[u]);
      if (it != f.scope.end() && *it == out.scope[u]) {
        mapped[u] = own[static_cast<size_t>(it - f.scope.begin())];
      }
    }
    return mapped;
  };
  const std::vector<size_t> sa = strides_in(a);
  const std::vector<size_t> sb = strides_in(b);

  std::vector<uint32_t> assignment(out.scope.size(), 0);
  size_t offa = 0;
  size_t offb = 0;
  for (size_t idx = 0; idx < total; ++idx) {
    out.table[idx] = a.table[offa] * b.table[offb];
    // odometer increment, last variable fastest
    for (size_t i = out.scope.size(); i-- > 0;) {
      offa += sa[i];
      offb += sb[i];
      if (++assignment[i] < out.cards[i]) break;
      offa -= static_cast<size_t>(assignment[i]) * sa[i];
      offb -= static_cast<size_t>(assignment[i]) * sb[i];
      assignment[i] = 0;
    }
  }
  return out;
}

Factor Factor::sum_out(vertex_id v) const {
  const auto it = std::lower_bound(scope.begin(), scope.end(), v);
  if (it == scope.end() || *it != v) {
    throw std::invalid_argument("sum_out: variable not in factor scope");
  }
  const size_t pos = static_cast<size_t>(it - scope.begin());

  Factor out;
  out.scope.reserve(scope.size() - 1);
  out.cards.reserve(scope.size() - 1);
  for (size_t i = 0; i < scope.size(); ++i) {
    if (i != pos) {
      out.scope.push_back(scope[i]);
      out.cards.push_back(cards[i]);
    }
  }
  size_t inner = 1; // stride of v in this table
  for (size_t i = scope.size(); i-- > pos + 1;) inner *= cards[i];
  const size_t card_v = cards[pos];
  const size_t block = inner * card_v;
  const size_t outer = table.size() / block;

  out.table.assign(table.size() / card_v, 0.0);
  size_t w = 0;
  for (size_t o = 0; o < outer; ++o) {
    const double* base = table.data() + o * block;
    for (size_t in = 0; in < inner; ++in, ++w) {
      double acc = 0.0;
      for (size_t x = 0; x < card_v; ++x) acc += base[x * inner + in];
      out.table[w] = acc;
    }
  }
  return out;
}

BeliefTable brute_force_marginals(const PairwiseMRF& graph) {
  const uint32_t num_vertices = graph.num_vertices();
  double log_states = 0.0;
  for (vertex_id v = 0; v < num_vertices; ++v) log_states += std::log2(static_cast<double>(graph.cardinality(v)));
  if (log_states > 26.0) {
    throw model_error("joint state space exceeds 2^26 assignments; brute force refused");
  }

  BeliefTable marginals(all_cardinalities(graph));
  for (vertex_id v = 0; v < num_vertices; ++v) {
    std::fill(marginals.at(v).begin(), marginals.at(v).end(), 0.0);
  }

  std::vector<uint32_t> assignment(num_vertices, 0);
  for (;;) {
    double weight = 1.0;
    for (vertex_id v = 0; v < num_vertices; ++v) weight *= graph.unary(v)[assignment[v]];
    for (edge_id e = 0; e < graph.num_edges(); ++e) {
      const auto [i, j] = graph.edge_endpoints(e);
      weight *= graph.pairwise(e)[static_cast<size_t>(assignment[i]) * graph.cardinality(j) + assignment[j]];
    }
    for (vertex_id v = 0; v < num_vertices; ++v) marginals.at(v)[assignment[v]] += weight;

    vertex_id v = num_vertices;
    while (v-- > 0) {
      if (++assignment[v] < graph.cardinality(v)) break;
      assignment[v] = 0;
      if (v == 0) goto done;
    }
    if (num_vertices == 0) break;
  }
done:
  for (vertex_id v = 0; v < num_vertices; ++v) normalize_in_place(marginals.at(v));
  return marginals;
}

BeliefTable variable_elimination(const PairwiseMRF& graph, std::span<const vertex_id> order,
                                 const VeOptions& options) {
  const uint32_t num_vertices = graph.num_vertices();
  {
    std::vector<bool> seen(num_vertices, false);
    if (order.size() != num_vertices) {
      throw std::invalid_argument("elimination order must be a permutation of the vertices");
    }
    for (vertex_id v : order) {
      if (v >= num_vertices || seen[v]) {
        throw std::invalid_argument("elimination order must be a permutation of the vertices");
      }
      seen[v] = true;
    }
  }

  std::vector<Factor> base;
  base.reserve(num_vertices + graph.num_edges());
  for (vertex_id v = 0; v < num_vertices; ++v) base.push_back(Factor::unary_of(graph, v));
  for (edge_id e = 0; e < graph.num_edges(); ++e) base.push_back(Factor::pairwise_of(graph, e));

  BeliefTable marginals(all_cardinalities(graph));
  for (vertex_id query = 0; query < num_vertices; ++query) {
    std::vector<Factor> pool = base;
    for (vertex_id victim : order) {
      if (victim == query) continue;
      // Multiply every factor mentioning the victim, then sum it out.
      Factor combined{{}, {}, {1.0}};
      bool found = false;
      for (size_t i = 0; i < pool.size();) {
        const Factor& f = pool[i];
        if (std::binary_search(f.scope.begin(), f.scope.end(), victim)) {
          combined = found ? combined.product(f) : f;
          found = true;
          if (combined.size() > options.max_table_entries) {
            throw model_error("variable elimination factor exceeds " +
                              std::to_string(options.max_table_entries) + " entries");
          }
          if (i + 1 != pool.size()) pool[i] = std::move(pool.back());
          pool.pop_back();
        } else {
          ++i;
        }
      }
      if (found) pool.push_back(combined.sum_out(victim));
    }
    Factor answer{{}, {}, {1.0}};
    for (const Factor& f : pool) answer = answer.product(f);
    // all remaining scope is {query}
    std::vector<double> norm(answer.table);
    normalize_in_place(norm);
    std::copy(norm.begin(), norm.end(), marginals.at(query).begin());
  }
  return marginals;
}

std::vector<vertex_id> min_degree_order(const PairwiseMRF& graph) {
  const uint32_t num_vertices = graph.num_vertices();
  std::vector<std::set<vertex_id>> neighbors(num_vertices);
  for (edge_id e = 0; e < graph.num_edges(); ++e) {
    const auto [i, j] = graph.edge_endpoints(e);
    neighbors[i].insert(j);
    neighbors[j].insert(i);
  }

  std::vector<bool> eliminated(num_vertices, false);
  std::vector<vertex_id> order;
  order.reserve(num_vertices);
  for (uint32_t step = 0; step < num_vertices; ++step) {
    vertex_id best = 0;
    size_t best_degree = SIZE_MAX;
    for (vertex_id v = 0; v < num_vertices; ++v) {
      if (!eliminated[v] && neighbors[v].size() < best_degree) {
        best = v;
        best_degree = neighbors[v].size();
      }
    }
    order.push_back(best);
    eliminated[best] = true;
    for (vertex_id u : neighbors[best]) {
      neighbors[u].erase(best);
      for (vertex_id w : neighbors[best]) {
        if (w != u) neighbors[u].insert(w);
      }
    }
    neighbors[best].clear();
  }
  return order;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0) {
      throw std::invalid_argument("kl_divergence: q lacks support where p is positive");
    }
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double mean_vertex_kl(const BeliefTable& exact, const BeliefTable& approx) {
  if (exact.num_vertices() != approx.num_vertices()) {
    throw std::invalid_argument("mean_vertex_kl: vertex count mismatch");
  }
  if (exact.num_vertices() == 0) return 0.0;
  double sum = 0.0;
  for (vertex_id v = 0; v < exact.num_vertices(); ++v) {
    sum += kl_divergence(exact.at(v), approx.at(v));
  }
  return sum / static_cast<double>(exact.num_vertices());
}

} // namespace bpsched
