#ifndef BPSCHED_RESIDUALS_HPP
#define BPSCHED_RESIDUALS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bpsched/messages.hpp"
#include "bpsched/mrf.hpp"

namespace bpsched {

class ThreadPool;

/// Per-directed-edge residuals with a one-step lookahead cache. For each edge
/// the tracker stores the candidate next update (computed against the current
/// store) and the max-norm distance between candidate and current message.
/// unconverged_count() is the number of edges with residual >= epsilon.
class ResidualTracker {
public:
  ResidualTracker() = default;

  /// Builds the tracker and performs a full refresh over all directed edges.
  ResidualTracker(const PairwiseMRF& graph, const MessageStore& messages, double epsilon);

  double epsilon() const { return epsilon_; }
  uint32_t unconverged_count() const { return unconverged_count_; }

  double residual_of(directed_edge_id d) const { return residuals_[d]; }
  std::span<const double> residuals() const { return residuals_; }

  /// Candidate next value of message d, consistent with the store the tracker
  /// was last refreshed against.
  std::span<const double> candidate(directed_edge_id d) const {
    return {candidates_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }

private:
  friend void refresh_residuals(const PairwiseMRF&, const MessageStore&, ResidualTracker&,
                                std::span<const directed_edge_id>, ThreadPool*);

  double epsilon_ = 0.0;
  uint32_t unconverged_count_ = 0;
  std::vector<double> residuals_;
  std::vector<size_t> offsets_;
  std::vector<double> candidates_;
};

/// Recomputes candidates and residuals for the touched edges and restores the
/// unconverged count. `touched` must contain each edge at most once and must
/// cover every edge whose candidate may have changed: after a frontier
/// application that is the frontier itself plus the outgoing edges of every
/// frontier target. Runs on `pool` when given, otherwise inline.
void refresh_residuals(const PairwiseMRF& graph, const MessageStore& messages,
                       ResidualTracker& tracker, std::span<const directed_edge_id> touched,
                       ThreadPool* pool = nullptr);

} // namespace bpsched

#endif
