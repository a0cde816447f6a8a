#include "bpsched/generators.hpp"

#include <cmath>

namespace bpsched {

namespace {

double unit_open(std::mt19937_64& rng) {
  // uniform (0, 1): exact zeros would violate potential positivity.
  double u = uniform_unit(rng);
  while (u == 0.0) u = uniform_unit(rng);
  return u;
}

} // namespace

std::array<double, 4> ising_edge_table(double lambda, double c) {
  const double agree = std::exp(lambda * c);
  const double disagree = std::exp(-lambda * c);
  return {agree, disagree, disagree, agree};
}

PairwiseMRF generate_ising(const IsingParams& params) {
  const uint32_t n = params.n;
  const uint32_t num_vertices = n * n;
  std::mt19937_64 rng(params.seed);

  std::vector<uint32_t> cards(num_vertices, 2);
  std::vector<std::vector<double>> unaries(num_vertices);
  for (uint32_t v = 0; v < num_vertices; ++v) {
    unaries[v] = {unit_open(rng), unit_open(rng)};
  }

  std::vector<PairwiseMRF::EdgeSpec> edges;
  edges.reserve(static_cast<size_t>(2) * n * (n - 1));
  for (uint32_t r = 0; r < n; ++r) {
    for (uint32_t c = 0; c < n; ++c) {
      const uint32_t v = r * n + c;
      if (c + 1 < n) edges.push_back({v, v + 1, {}});
      if (r + 1 < n) edges.push_back({v, v + n, {}});
    }
  }
  for (PairwiseMRF::EdgeSpec& e : edges) {
    const double lambda = uniform_unit(rng) - 0.5;
    const std::array<double, 4> t = ising_edge_table(lambda, params.c);
    e.table.assign(t.begin(), t.end());
  }
  return build_graph(std::move(cards), std::move(unaries), std::move(edges));
}

PairwiseMRF generate_chain(const ChainParams& params) {
  const uint32_t n = params.length;
  std::mt19937_64 rng(params.seed);

  std::vector<uint32_t> cards(n, 2);
  std::vector<std::vector<double>> unaries(n);
  for (uint32_t v = 0; v < n; ++v) {
    unaries[v] = {unit_open(rng), unit_open(rng)};
  }

  std::vector<PairwiseMRF::EdgeSpec> edges;
  edges.reserve(n > 0 ? n - 1 : 0);
  for (uint32_t v = 0; v + 1 < n; ++v) {
    const double lambda = uniform_unit(rng) - 0.5;
    const std::array<double, 4> t = ising_edge_table(lambda, params.c);
    edges.push_back({v, v + 1, {t.begin(), t.end()}});
  }
  return build_graph(std::move(cards), std::move(unaries), std::move(edges));
}

} // namespace bpsched
