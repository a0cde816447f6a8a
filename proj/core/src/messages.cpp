#include "bpsched/messages.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bpsched/errors.hpp"

namespace bpsched {

void MessageStore::write(directed_edge_id d, std::span<const double> values) {
  std::copy(values.begin(), values.end(), values_.begin() + offsets_[d]);
}

void MessageStore::commit_shadow(std::span<const directed_edge_id> written) {
  for (directed_edge_id d : written) {
    std::copy(shadow_.begin() + offsets_[d], shadow_.begin() + offsets_[d + 1],
              values_.begin() + offsets_[d]);
  }
  ++generation_;
}

MessageStore init_messages(const PairwiseMRF& graph) {
  MessageStore store;
  const uint32_t m = graph.num_directed_edges();
  store.offsets_.reserve(m + 1);
  store.offsets_.push_back(0);
  for (directed_edge_id d = 0; d < m; ++d) {
    store.offsets_.push_back(store.offsets_.back() + graph.cardinality(graph.directed_edge(d).target));
  }
  store.values_.resize(store.offsets_.back());
  for (directed_edge_id d = 0; d < m; ++d) {
    const size_t len = store.offsets_[d + 1] - store.offsets_[d];
    const double u = 1.0 / static_cast<double>(len);
    std::fill(store.values_.begin() + store.offsets_[d], store.values_.begin() + store.offsets_[d + 1], u);
  }
  store.shadow_ = store.values_;
  return store;
}

void normalize_in_place(std::span<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum >= 1e-300) || !std::isfinite(sum)) {
    throw numeric_error("probability vector collapsed: total mass " + std::to_string(sum));
  }
  const double inv = 1.0 / sum;
  for (double& x : v) x *= inv;
}

std::vector<double> normalize(std::vector<double> v) {
  normalize_in_place(v);
  return v;
}

double residual(std::span<const double> candidate, std::span<const double> current) {
  if (candidate.size() != current.size()) {
    throw std::invalid_argument("residual: length mismatch");
  }
  double worst = 0.0;
  for (size_t i = 0; i < candidate.size(); ++i) {
    worst = std::max(worst, std::fabs(candidate[i] - current[i]));
  }
  return worst;
}

std::vector<double> update_message(const PairwiseMRF& graph, const MessageStore& messages,
                                   directed_edge_id d) {
  std::vector<double> out(graph.cardinality(graph.directed_edge(d).target));
  std::vector<double> scratch(graph.max_cardinality());
  detail::update_message_into(graph, messages, d, out, scratch);
  return out;
}

BeliefTable::BeliefTable(const std::vector<uint32_t>& cardinalities) {
  offsets_.reserve(cardinalities.size() + 1);
  offsets_.push_back(0);
  for (uint32_t c : cardinalities) offsets_.push_back(offsets_.back() + c);
  values_.resize(offsets_.back());
}

std::vector<double> compute_belief(const PairwiseMRF& graph, const MessageStore& messages,
                                   vertex_id v) {
  const std::span<const double> unary = graph.unary(v);
  std::vector<double> out(unary.begin(), unary.end());
  for (directed_edge_id in : graph.incoming(v)) {
    const std::span<const double> m = messages.view(in);
    for (size_t x = 0; x < out.size(); ++x) out[x] *= m[x];
  }
  normalize_in_place(out);
  return out;
}

BeliefTable compute_beliefs(const PairwiseMRF& graph, const MessageStore& messages) {
  std::vector<uint32_t> cards(graph.num_vertices());
  for (vertex_id v = 0; v < graph.num_vertices(); ++v) cards[v] = graph.cardinality(v);
  BeliefTable table(cards);
  for (vertex_id v = 0; v < graph.num_vertices(); ++v) {
    const std::vector<double> b = compute_belief(graph, messages, v);
    std::copy(b.begin(), b.end(), table.at(v).begin());
  }
  return table;
}

} // namespace bpsched
