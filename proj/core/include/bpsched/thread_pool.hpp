#ifndef BPSCHED_THREAD_POOL_HPP
#define BPSCHED_THREAD_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bpsched {

/// Fixed-size worker pool for bulk frontier steps. parallel_for splits
/// [0, count) into one contiguous chunk per worker; the chunk boundaries
/// depend only on count and worker count, so any computation whose writes are
/// slot-exclusive produces identical results for every pool size.
class ThreadPool {
public:
  /// `workers` <= 1 runs everything inline on the calling thread.
  explicit ThreadPool(unsigned workers);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned worker_count() const { return workers_; }

  /// Invokes fn(chunk_index, begin, end) for each chunk and waits for all of
  /// them. fn must not touch pool state.
  void parallel_for(size_t count, const std::function<void(unsigned, size_t, size_t)>& fn);

private:
  void worker_loop(unsigned index);

  unsigned workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(unsigned, size_t, size_t)>* job_ = nullptr;
  size_t job_count_ = 0;
  uint64_t job_ticket_ = 0;
  unsigned remaining_ = 0;
  bool stop_ = false;
};

} // namespace bpsched

#endif
