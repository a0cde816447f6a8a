#include <algorithm>
#include <chrono>
#include <vector>

#include <boost/heap/fibonacci_heap.hpp>

#include "bpsched/schedulers.hpp"

namespace bpsched {

namespace {

struct PqItem {
  double res;
  directed_edge_id id;
};

// Max-heap by residual, ties popped lowest-id first.
struct PqLess {
  bool operator()(const PqItem& a, const PqItem& b) const {
    if (a.res != b.res) return a.res < b.res;
    return a.id > b.id;
  }
};

using Heap = boost::heap::fibonacci_heap<PqItem, boost::heap::compare<PqLess>>;

} // namespace

RunResult run_serial_rbp(const PairwiseMRF& graph, const SchedulerConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  MessageStore messages = init_messages(graph);
  ResidualTracker tracker(graph, messages, config.epsilon);

  const uint32_t m = graph.num_directed_edges();
  Heap heap;
  std::vector<Heap::handle_type> handles;
  handles.reserve(m);
  for (directed_edge_id d = 0; d < m; ++d) {
    handles.push_back(heap.push({tracker.residual_of(d), d}));
  }

  RunResult result;
  std::vector<directed_edge_id> touched;
  uint64_t updates = 0;
  while (!heap.empty()) {
    const PqItem top = heap.top();
    if (top.res < config.epsilon) break;
    if (updates >= config.max_iterations || elapsed() >= config.time_limit) break;

    const directed_edge_id d = top.id;
    messages.write(d, tracker.candidate(d));
    messages.bump_generation();

    touched.clear();
    touched.push_back(d);
    for (directed_edge_id in : graph.incoming(graph.directed_edge(d).target)) {
      touched.push_back(reverse_edge(in));
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    refresh_residuals(graph, messages, tracker, touched);
    for (directed_edge_id e : touched) {
      heap.update(handles[e], {tracker.residual_of(e), e});
    }

    ++updates;
    result.trace.push_back({updates - 1, 1, tracker.unconverged_count(), elapsed()});
  }

  result.converged = tracker.unconverged_count() == 0;
  result.iterations = updates;
  result.messages_updated_total = updates;
  result.wall_time = elapsed();
  result.beliefs = compute_beliefs(graph, messages);
  return result;
}

} // namespace bpsched
