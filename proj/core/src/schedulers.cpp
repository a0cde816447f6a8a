#include "bpsched/schedulers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "bpsched/errors.hpp"
#include "bpsched/rng.hpp"

namespace bpsched {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// frontier plus the outgoing edges of every frontier target, deduplicated.
void collect_touched(const PairwiseMRF& graph, std::span<const directed_edge_id> frontier,
                     std::vector<directed_edge_id>& touched) {
  touched.clear();
  for (directed_edge_id d : frontier) {
    touched.push_back(d);
    for (directed_edge_id in : graph.incoming(graph.directed_edge(d).target)) {
      touched.push_back(reverse_edge(in));
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
}

/// Message view that routes reads of already-written splash edges through the
/// shadow buffer, so updates within a splash see earlier same-splash writes
/// while everything else stays at the pre-step snapshot.
struct SplashOverlayView {
  const MessageStore* store;
  const std::unordered_set<directed_edge_id>* written;

  std::span<const double> view(directed_edge_id d) const {
    return written->contains(d) ? store->shadow_view(d) : store->view(d);
  }
};

} // namespace

const char* to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::lbp: return "lbp";
    case SchedulerKind::serial_rbp: return "srbp";
    case SchedulerKind::rbp: return "rbp";
    case SchedulerKind::rs: return "rs";
    case SchedulerKind::rnbp: return "rnbp";
  }
  return "?";
}

std::optional<SchedulerKind> scheduler_from_string(std::string_view name) {
  if (name == "lbp") return SchedulerKind::lbp;
  if (name == "srbp" || name == "serial_rbp") return SchedulerKind::serial_rbp;
  if (name == "rbp") return SchedulerKind::rbp;
  if (name == "rs") return SchedulerKind::rs;
  if (name == "rnbp") return SchedulerKind::rnbp;
  return std::nullopt;
}

void SchedulerConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
  if (!(low_p > 0.0) || low_p > high_p || high_p > 1.0) {
    throw std::invalid_argument("parallelism settings must satisfy 0 < low_p <= high_p <= 1");
  }
  if (!(edge_ratio_threshold > 0.0) || edge_ratio_threshold > 1.0) {
    throw std::invalid_argument("edge_ratio_threshold must be in (0, 1]");
  }
  if (!(time_limit > 0.0)) throw std::invalid_argument("time_limit must be positive");
}

EngineState::EngineState(const PairwiseMRF& graph, const SchedulerConfig& config)
    : graph_(&graph),
      messages_(init_messages(graph)),
      tracker_(graph, messages_, config.epsilon),
      rng_(config.seed),
      pool_(std::make_unique<ThreadPool>(resolve_workers(config.worker_count))) {}

std::vector<directed_edge_id> frontier_lbp(const EngineState& state) {
  std::vector<directed_edge_id> all(state.graph().num_directed_edges());
  std::iota(all.begin(), all.end(), 0u);
  return all;
}

std::vector<directed_edge_id> select_top_k(std::span<const double> residuals, uint64_t k) {
  std::vector<directed_edge_id> ids(residuals.size());
  std::iota(ids.begin(), ids.end(), 0u);
  if (k >= ids.size()) return ids;
  const auto best_first = [&](directed_edge_id a, directed_edge_id b) {
    if (residuals[a] != residuals[b]) return residuals[a] > residuals[b];
    return a < b;
  };
  std::nth_element(ids.begin(), ids.begin() + static_cast<ptrdiff_t>(k), ids.end(), best_first);
  ids.resize(k);
  return ids;
}

std::vector<directed_edge_id> top_k_messages(const EngineState& state, uint64_t k) {
  return select_top_k(state.tracker().residuals(), k);
}

std::vector<directed_edge_id> rbp_frontier(const EngineState& state, double p) {
  const uint64_t m = state.graph().num_directed_edges();
  const uint64_t k = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(p * static_cast<double>(m))));
  return top_k_messages(state, k);
}

double vertex_residual(const EngineState& state, vertex_id v) {
  double worst = 0.0;
  for (directed_edge_id in : state.graph().incoming(v)) {
    worst = std::max(worst, state.tracker().residual_of(in));
  }
  return worst;
}

Splash build_splash(const EngineState& state, vertex_id root, uint32_t h,
                    std::vector<vertex_id>& claimed) {
  if (claimed[root] != kUnclaimed) {
    throw std::invalid_argument("splash root " + std::to_string(root) + " is already claimed");
  }
  const PairwiseMRF& graph = state.graph();
  Splash splash{root, {}};
  std::deque<std::pair<vertex_id, uint32_t>> queue;
  std::vector<vertex_id> visited;
  claimed[root] = root;
  queue.emplace_back(root, 0);
  while (!queue.empty()) {
    const auto [v, depth] = queue.front();
    queue.pop_front();
    visited.push_back(v);
    if (depth < h) {
      for (directed_edge_id in : graph.incoming(v)) {
        const vertex_id neighbor = graph.directed_edge(in).source;
        if (claimed[neighbor] == kUnclaimed) {
          claimed[neighbor] = root;
          queue.emplace_back(neighbor, depth + 1);
        }
      }
    }
  }
  for (vertex_id v : visited) {
    for (directed_edge_id in : graph.incoming(v)) {
      splash.edges.push_back(reverse_edge(in));
    }
  }
  return splash;
}

std::vector<Splash> rs_frontier(EngineState& state, double p, uint32_t h) {
  const uint32_t num_vertices = state.graph().num_vertices();
  if (num_vertices == 0) return {};
  const uint64_t k =
      std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(p * static_cast<double>(num_vertices))));

  std::vector<vertex_id> order(num_vertices);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> vres(num_vertices, 0.0);
  for (vertex_id v = 0; v < num_vertices; ++v) vres[v] = vertex_residual(state, v);
  std::sort(order.begin(), order.end(), [&](vertex_id a, vertex_id b) {
    if (vres[a] != vres[b]) return vres[a] > vres[b];
    return a < b;
  });

  std::vector<vertex_id> claimed(num_vertices, kUnclaimed);
  std::vector<Splash> splashes;
  for (vertex_id root : order) {
    if (splashes.size() >= k) break;
    if (claimed[root] != kUnclaimed) continue;
    splashes.push_back(build_splash(state, root, h, claimed));
  }
  return splashes;
}

std::vector<directed_edge_id> rnbp_frontier(const EngineState& state, double p,
                                            std::mt19937_64& rng) {
  const uint32_t m = state.graph().num_directed_edges();
  const double epsilon = state.tracker().epsilon();
  std::vector<directed_edge_id> survivors;
  for (directed_edge_id d = 0; d < m; ++d) {
    if (state.tracker().residual_of(d) >= epsilon) survivors.push_back(d);
  }
  if (survivors.empty()) return {};

  std::vector<directed_edge_id> frontier;
  for (int attempt = 0; attempt < 2; ++attempt) {
    frontier.clear();
    for (directed_edge_id d : survivors) {
      if (uniform_unit(rng) < p) frontier.push_back(d);
    }
    if (!frontier.empty()) return frontier;
  }
  const size_t pick = std::min(survivors.size() - 1,
                               static_cast<size_t>(uniform_unit(rng) * static_cast<double>(survivors.size())));
  frontier.push_back(survivors[pick]);
  return frontier;
}

double select_parallelism(uint32_t prev_unconverged, uint32_t new_unconverged,
                          const SchedulerConfig& config) {
  if (prev_unconverged == 0) return config.high_p;
  const double edge_ratio =
      static_cast<double>(new_unconverged) / static_cast<double>(prev_unconverged);
  return edge_ratio > config.edge_ratio_threshold ? config.low_p : config.high_p;
}

void apply_frontier(EngineState& state, std::span<const directed_edge_id> frontier) {
  const PairwiseMRF& graph = *state.graph_;
  MessageStore& messages = state.messages_;
  ResidualTracker& tracker = state.tracker_;
  if (!frontier.empty()) {
    auto copy_range = [&](unsigned, size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        messages.write(frontier[i], tracker.candidate(frontier[i]));
      }
    };
    if (state.pool_->worker_count() > 1 && frontier.size() > 1) {
      state.pool_->parallel_for(frontier.size(), copy_range);
    } else {
      copy_range(0, 0, frontier.size());
    }
    messages.bump_generation();

    if (frontier.size() == graph.num_directed_edges()) {
      // Full sweep: the touched set is every edge; reuse the frontier.
      refresh_residuals(graph, messages, tracker, frontier, state.pool_.get());
    } else {
      collect_touched(graph, frontier, state.touched_scratch_);
      refresh_residuals(graph, messages, tracker, state.touched_scratch_, state.pool_.get());
    }
  }
}

void apply_splash_frontier(EngineState& state, std::span<const Splash> splashes) {
  const PairwiseMRF& graph = *state.graph_;
  MessageStore& messages = state.messages_;

  std::vector<directed_edge_id> all_edges;
  for (const Splash& s : splashes) {
    all_edges.insert(all_edges.end(), s.edges.begin(), s.edges.end());
  }
  if (all_edges.empty()) return;
  {
    std::vector<directed_edge_id> check(all_edges);
    std::sort(check.begin(), check.end());
    if (std::adjacent_find(check.begin(), check.end()) != check.end()) {
      throw model_error("overlapping splashes: an edge is updated by two splashes");
    }
  }

  auto run_splash = [&](const Splash& splash) {
    std::unordered_set<directed_edge_id> written;
    written.reserve(splash.edges.size());
    SplashOverlayView view{&messages, &written};
    std::vector<double> scratch(graph.max_cardinality());
    for (directed_edge_id d : splash.edges) {
      detail::update_message_into(graph, view, d, messages.shadow_slot(d), scratch);
      written.insert(d);
    }
  };
  if (state.pool_->worker_count() > 1 && splashes.size() > 1) {
    state.pool_->parallel_for(splashes.size(), [&](unsigned, size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) run_splash(splashes[i]);
    });
  } else {
    for (const Splash& s : splashes) run_splash(s);
  }

  messages.commit_shadow(all_edges);
  collect_touched(graph, all_edges, state.touched_scratch_);
  refresh_residuals(graph, messages, state.tracker_, state.touched_scratch_, state.pool_.get());
}

RunResult run(const PairwiseMRF& graph, const SchedulerConfig& config) {
  config.validate();
  if (config.kind == SchedulerKind::serial_rbp) return run_serial_rbp(graph, config);

  const Clock::time_point t0 = Clock::now();
  EngineState state(graph, config);
  RunResult result;

  for (;;) {
    const uint32_t unconverged = state.tracker().unconverged_count();
    if (unconverged == 0) {
      result.converged = true;
      break;
    }
    if (state.iteration() >= config.max_iterations || seconds_since(t0) >= config.time_limit) {
      break;
    }

    uint64_t frontier_size = 0;
    switch (config.kind) {
      case SchedulerKind::lbp: {
        const std::vector<directed_edge_id> frontier = frontier_lbp(state);
        frontier_size = frontier.size();
        apply_frontier(state, frontier);
        break;
      }
      case SchedulerKind::rbp: {
        const std::vector<directed_edge_id> frontier = rbp_frontier(state, config.p);
        frontier_size = frontier.size();
        apply_frontier(state, frontier);
        break;
      }
      case SchedulerKind::rnbp: {
        const double p_now = select_parallelism(state.prev_unconverged().value_or(0), unconverged, config);
        state.set_prev_unconverged(unconverged);
        const std::vector<directed_edge_id> frontier = rnbp_frontier(state, p_now, state.rng());
        frontier_size = frontier.size();
        apply_frontier(state, frontier);
        break;
      }
      case SchedulerKind::rs: {
        const std::vector<Splash> splashes = rs_frontier(state, config.p, config.splash_depth);
        for (const Splash& s : splashes) frontier_size += s.edges.size();
        apply_splash_frontier(state, splashes);
        break;
      }
      case SchedulerKind::serial_rbp:
        break; // dispatched above
    }

    result.messages_updated_total += frontier_size;
    result.trace.push_back({state.iteration(), frontier_size, state.tracker().unconverged_count(),
                            seconds_since(t0)});
    state.advance_iteration();
  }

  result.iterations = state.iteration();
  result.wall_time = seconds_since(t0);
  result.beliefs = compute_beliefs(graph, state.messages());
  return result;
}

} // namespace bpsched
