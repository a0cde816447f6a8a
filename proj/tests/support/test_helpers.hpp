#ifndef BPSCHED_TEST_HELPERS_HPP
#define BPSCHED_TEST_HELPERS_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bpsched/messages.hpp"
#include "bpsched/mrf.hpp"
#include "bpsched/rng.hpp"
#include "bpsched/schedulers.hpp"

namespace bptest {

/// Independent evaluation of the message update, written naively from the
/// sum-product definition. Kept separate from the library kernel so tests can
/// cross-check the production path against it.
inline std::vector<double> naive_update(const bpsched::PairwiseMRF& g,
                                        const bpsched::MessageStore& msgs,
                                        bpsched::directed_edge_id d) {
  const auto& de = g.directed_edge(d);
  const auto [lo, hi] = g.edge_endpoints(de.undirected);
  const auto table = g.pairwise(de.undirected);
  const uint32_t ci = g.cardinality(de.source);
  const uint32_t cj = g.cardinality(de.target);

  // psi(x_source, x_target) routed through the canonical low-high table.
  const auto psi = [&](uint32_t xs, uint32_t xt) {
    const uint32_t xlo = de.source == lo ? xs : xt;
    const uint32_t xhi = de.source == lo ? xt : xs;
    return table[static_cast<size_t>(xlo) * g.cardinality(hi) + xhi];
  };

  std::vector<double> out(cj, 0.0);
  for (uint32_t xj = 0; xj < cj; ++xj) {
    for (uint32_t xi = 0; xi < ci; ++xi) {
      double term = psi(xi, xj) * g.unary(de.source)[xi];
      for (bpsched::directed_edge_id in : g.incoming(de.source)) {
        if (g.directed_edge(in).source == de.target) continue;
        term *= msgs.view(in)[xi];
      }
      out[xj] += term;
    }
  }
  double sum = 0.0;
  for (double v : out) sum += v;
  for (double& v : out) v /= sum;
  return out;
}

/// Exact per-vertex marginals by direct enumeration of the joint
/// distribution. Independent of the library's exact-inference module.
inline std::vector<std::vector<double>> enumerate_marginals(const bpsched::PairwiseMRF& g) {
  const uint32_t n = g.num_vertices();
  std::vector<std::vector<double>> marg(n);
  for (bpsched::vertex_id v = 0; v < n; ++v) marg[v].assign(g.cardinality(v), 0.0);

  std::vector<uint32_t> a(n, 0);
  bool more = n > 0;
  while (more) {
    double w = 1.0;
    for (bpsched::vertex_id v = 0; v < n; ++v) w *= g.unary(v)[a[v]];
    for (bpsched::edge_id e = 0; e < g.num_edges(); ++e) {
      const auto [i, j] = g.edge_endpoints(e);
      w *= g.pairwise(e)[static_cast<size_t>(a[i]) * g.cardinality(j) + a[j]];
    }
    for (bpsched::vertex_id v = 0; v < n; ++v) marg[v][a[v]] += w;

    more = false;
    for (uint32_t v = n; v-- > 0;) {
      if (++a[v] < g.cardinality(v)) {
        more = true;
        break;
      }
      a[v] = 0;
    }
  }
  for (auto& mv : marg) {
    double sum = 0.0;
    for (double x : mv) sum += x;
    for (double& x : mv) x /= sum;
  }
  return marg;
}

/// Random graph for property tests: `n` vertices with cardinalities in
/// [2, max_card], a random spanning tree plus extra edges with the given
/// probability, and log-uniform positive potentials.
inline bpsched::PairwiseMRF random_graph(std::mt19937_64& rng, uint32_t n, uint32_t max_card = 3,
                                         double extra_edge_prob = 0.2) {
  using bpsched::uniform_unit;
  std::vector<uint32_t> cards(n);
  for (auto& c : cards) c = 2 + static_cast<uint32_t>(uniform_unit(rng) * (max_card - 1));

  const auto positive = [&] { return std::exp(2.0 * uniform_unit(rng) - 1.0); };

  std::vector<std::vector<double>> unaries(n);
  for (uint32_t v = 0; v < n; ++v) {
    unaries[v].resize(cards[v]);
    for (auto& x : unaries[v]) x = positive();
  }

  std::vector<bpsched::PairwiseMRF::EdgeSpec> edges;
  const auto add_edge = [&](uint32_t i, uint32_t j) {
    bpsched::PairwiseMRF::EdgeSpec spec{i, j, {}};
    spec.table.resize(static_cast<size_t>(cards[i]) * cards[j]);
    for (auto& x : spec.table) x = positive();
    edges.push_back(std::move(spec));
  };
  for (uint32_t v = 1; v < n; ++v) {
    add_edge(static_cast<uint32_t>(uniform_unit(rng) * v), v); // random parent: spanning tree
  }
  for (uint32_t i = 0; i + 1 < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j) {
      if (uniform_unit(rng) < extra_edge_prob) add_edge(i, j);
    }
  }
  // Drop duplicates against the tree edges.
  std::vector<bpsched::PairwiseMRF::EdgeSpec> unique_edges;
  std::vector<std::pair<uint32_t, uint32_t>> seen;
  for (auto& e : edges) {
    const std::pair<uint32_t, uint32_t> key{e.i, e.j};
    bool dup = false;
    for (const auto& s : seen) dup = dup || s == key;
    if (!dup) {
      seen.push_back(key);
      unique_edges.push_back(std::move(e));
    }
  }
  return bpsched::build_graph(std::move(cards), std::move(unaries), std::move(unique_edges));
}

/// Random tree with binary variables and Ising-style potentials of
/// difficulty c (uniform random parent attachment).
inline bpsched::PairwiseMRF random_tree(std::mt19937_64& rng, uint32_t n, double c) {
  using bpsched::uniform_unit;
  std::vector<uint32_t> cards(n, 2);
  std::vector<std::vector<double>> unaries(n);
  for (auto& u : unaries) {
    u = {uniform_unit(rng), uniform_unit(rng)};
    for (double& x : u) {
      while (x == 0.0) x = uniform_unit(rng);
    }
  }
  std::vector<bpsched::PairwiseMRF::EdgeSpec> edges;
  for (uint32_t v = 1; v < n; ++v) {
    const uint32_t parent = static_cast<uint32_t>(uniform_unit(rng) * v);
    const double lambda = uniform_unit(rng) - 0.5;
    const double agree = std::exp(lambda * c);
    const double disagree = std::exp(-lambda * c);
    edges.push_back({parent, v, {agree, disagree, disagree, agree}});
  }
  return bpsched::build_graph(std::move(cards), std::move(unaries), std::move(edges));
}

/// Deterministic part of a run trace: everything except wall-clock columns.
inline std::string trace_signature(const bpsched::RunResult& r) {
  std::string s = r.converged ? "C" : "N";
  s += ":" + std::to_string(r.iterations) + ":" + std::to_string(r.messages_updated_total);
  for (const auto& rec : r.trace) {
    s += ";" + std::to_string(rec.iteration) + "," + std::to_string(rec.frontier_size) + "," +
         std::to_string(rec.unconverged);
  }
  return s;
}

/// Bitwise equality of two message stores.
inline bool stores_identical(const bpsched::MessageStore& a, const bpsched::MessageStore& b) {
  if (a.num_messages() != b.num_messages()) return false;
  for (bpsched::directed_edge_id d = 0; d < a.num_messages(); ++d) {
    const auto va = a.view(d);
    const auto vb = b.view(d);
    if (va.size() != vb.size()) return false;
    for (size_t i = 0; i < va.size(); ++i) {
      if (va[i] != vb[i]) return false;
    }
  }
  return true;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

} // namespace bptest

#endif
