#ifndef BPSCHED_SCHEDULERS_HPP
#define BPSCHED_SCHEDULERS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bpsched/messages.hpp"
#include "bpsched/mrf.hpp"
#include "bpsched/residuals.hpp"
#include "bpsched/thread_pool.hpp"

namespace bpsched {

struct Splash;

enum class SchedulerKind { lbp, serial_rbp, rbp, rs, rnbp };

const char* to_string(SchedulerKind kind);
std::optional<SchedulerKind> scheduler_from_string(std::string_view name);

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::lbp;
  double epsilon = 1e-5;            // convergence threshold on the residual
  double p = 1.0;                   // frontier fraction for rbp / rs
  uint32_t splash_depth = 2;        // BFS radius h for rs
  double low_p = 0.7;               // rnbp parallelism when convergence stalls
  double high_p = 1.0;              // rnbp parallelism otherwise
  double edge_ratio_threshold = 0.9;
  uint64_t max_iterations = 10000;
  double time_limit = 90.0;         // seconds, wall clock
  uint64_t seed = 0;
  unsigned worker_count = 0;        // 0 = hardware concurrency

  /// Throws std::invalid_argument when a knob is out of range.
  void validate() const;
};

struct IterationRecord {
  uint64_t iteration;
  uint64_t frontier_size;
  uint32_t unconverged;
  double elapsed_seconds;
};

struct RunResult {
  bool converged = false;
  uint64_t iterations = 0;
  double wall_time = 0.0;
  uint64_t messages_updated_total = 0;
  BeliefTable beliefs;
  std::vector<IterationRecord> trace;
};

/// Mutable per-run state shared by the frontier operations. Owned by exactly
/// one run; the graph itself is immutable and shareable.
class EngineState {
public:
  EngineState(const PairwiseMRF& graph, const SchedulerConfig& config);

  const PairwiseMRF& graph() const { return *graph_; }
  const MessageStore& messages() const { return messages_; }
  MessageStore& messages() { return messages_; }
  const ResidualTracker& tracker() const { return tracker_; }
  ResidualTracker& tracker() { return tracker_; }
  uint64_t iteration() const { return iteration_; }
  std::optional<uint32_t> prev_unconverged() const { return prev_unconverged_; }
  std::mt19937_64& rng() { return rng_; }
  ThreadPool& pool() { return *pool_; }

  void advance_iteration() { ++iteration_; }
  void set_prev_unconverged(uint32_t count) { prev_unconverged_ = count; }

private:
  const PairwiseMRF* graph_;
  MessageStore messages_;
  ResidualTracker tracker_;
  uint64_t iteration_ = 0;
  std::optional<uint32_t> prev_unconverged_;
  std::mt19937_64 rng_;
  std::unique_ptr<ThreadPool> pool_;
  std::vector<directed_edge_id> touched_scratch_;

  friend void apply_frontier(EngineState&, std::span<const directed_edge_id>);
  friend void apply_splash_frontier(EngineState&, std::span<const Splash>);
};

/// A splash: the root vertex plus the outgoing edges of all claimed vertices
/// in BFS visit order.
struct Splash {
  vertex_id root;
  std::vector<directed_edge_id> edges;
};

constexpr vertex_id kUnclaimed = UINT32_MAX;

/// LBP frontier: every directed edge, every iteration.
std::vector<directed_edge_id> frontier_lbp(const EngineState& state);

/// Selection core of top_k_messages: indices of the k largest values, ties
/// broken by lower index. Returns all indices when k >= residuals.size().
std::vector<directed_edge_id> select_top_k(std::span<const double> residuals, uint64_t k);

/// The k directed edges with the largest residuals, ties broken by lower edge
/// id. Returns all edges when k >= 2|E|.
std::vector<directed_edge_id> top_k_messages(const EngineState& state, uint64_t k);

/// Bulk RBP frontier: top k = max(1, round(p * 2|E|)) messages by residual.
std::vector<directed_edge_id> rbp_frontier(const EngineState& state, double p);

/// Max residual over the edges targeting `v`; 0 for isolated vertices.
double vertex_residual(const EngineState& state, vertex_id v);

/// BFS of depth h from `root` over unclaimed vertices, claiming each visited
/// vertex. Returns the outgoing edges of the visited vertices in visit order.
/// Throws std::invalid_argument when the root is already claimed.
Splash build_splash(const EngineState& state, vertex_id root, uint32_t h,
                    std::vector<vertex_id>& claimed);

/// Residual Splash frontier: walks vertices by descending vertex residual
/// (ties by lower id) and builds splashes around unclaimed roots until
/// k = max(1, round(p * |V|)) splashes exist or candidates run out.
std::vector<Splash> rs_frontier(EngineState& state, double p, uint32_t h);

/// Randomized BP frontier. Filter 1 keeps edges with residual >= epsilon;
/// filter 2 keeps each survivor independently with probability p. An empty
/// draw is retried once, then falls back to one uniformly chosen survivor.
std::vector<directed_edge_id> rnbp_frontier(const EngineState& state, double p,
                                            std::mt19937_64& rng);

/// EdgeRatio rule: with no previous count (prev == 0) returns high_p; else
/// returns low_p when new_count / prev_count exceeds the threshold, high_p
/// otherwise (boundary inclusive to high_p).
double select_parallelism(uint32_t prev_unconverged, uint32_t new_unconverged,
                          const SchedulerConfig& config);

/// Bulk-synchronous frontier application: every frontier edge moves to its
/// candidate value (all candidates were computed against the pre-step
/// snapshot), then residuals refresh over the touched set. Deterministic for
/// a fixed frontier, independent of worker count.
void apply_frontier(EngineState& state, std::span<const directed_edge_id> frontier);

/// Applies vertex-disjoint splashes: edges within one splash update
/// sequentially, seeing earlier same-splash writes; distinct splashes read the
/// pre-step snapshot and may run concurrently. Throws model_error when the
/// splashes overlap.
void apply_splash_frontier(EngineState& state, std::span<const Splash> splashes);

/// Runs the configured scheduler until every residual drops below epsilon or
/// an iteration / time cap is hit (caps yield converged = false, not an
/// error). Numeric collapse propagates as numeric_error.
RunResult run(const PairwiseMRF& graph, const SchedulerConfig& config);

/// Serial RBP: a max-priority queue on message residuals, popping and applying
/// one update at a time. One trace record per message update.
RunResult run_serial_rbp(const PairwiseMRF& graph, const SchedulerConfig& config);

} // namespace bpsched

#endif
