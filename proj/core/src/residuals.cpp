#include "bpsched/residuals.hpp"

#include <numeric>

#include "bpsched/thread_pool.hpp"

namespace bpsched {

ResidualTracker::ResidualTracker(const PairwiseMRF& graph, const MessageStore& messages,
                                 double epsilon)
    : epsilon_(epsilon) {
  const uint32_t m = graph.num_directed_edges();
  residuals_.assign(m, 0.0);
  offsets_.reserve(m + 1);
  offsets_.push_back(0);
  for (directed_edge_id d = 0; d < m; ++d) {
    offsets_.push_back(offsets_.back() + graph.cardinality(graph.directed_edge(d).target));
  }
  candidates_.resize(offsets_.back());

  std::vector<directed_edge_id> all(m);
  std::iota(all.begin(), all.end(), 0u);
  refresh_residuals(graph, messages, *this, all);
}

void refresh_residuals(const PairwiseMRF& graph, const MessageStore& messages,
                       ResidualTracker& tracker, std::span<const directed_edge_id> touched,
                       ThreadPool* pool) {
  if (touched.empty()) return;

  auto refresh_range = [&](size_t begin, size_t end) -> int64_t {
    std::vector<double> scratch(graph.max_cardinality());
    int64_t delta = 0;
    for (size_t idx = begin; idx < end; ++idx) {
      const directed_edge_id d = touched[idx];
      const bool was_unconverged = tracker.residuals_[d] >= tracker.epsilon_;
      const std::span<double> cand{tracker.candidates_.data() + tracker.offsets_[d],
                                   tracker.offsets_[d + 1] - tracker.offsets_[d]};
      detail::update_message_into(graph, messages, d, cand, scratch);
      tracker.residuals_[d] = residual(cand, messages.view(d));
      const bool now_unconverged = tracker.residuals_[d] >= tracker.epsilon_;
      delta += static_cast<int64_t>(now_unconverged) - static_cast<int64_t>(was_unconverged);
    }
    return delta;
  };

  int64_t total_delta = 0;
  if (pool != nullptr && pool->worker_count() > 1 && touched.size() >= 2) {
    std::vector<int64_t> deltas(pool->worker_count(), 0);
    pool->parallel_for(touched.size(), [&](unsigned chunk, size_t begin, size_t end) {
      deltas[chunk] = refresh_range(begin, end);
    });
    for (int64_t d : deltas) total_delta += d; // fixed chunk order
  } else {
    total_delta = refresh_range(0, touched.size());
  }
  tracker.unconverged_count_ = static_cast<uint32_t>(
      static_cast<int64_t>(tracker.unconverged_count_) + total_delta);
}

} // namespace bpsched
