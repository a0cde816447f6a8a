#include "bpsched/thread_pool.hpp"

namespace bpsched {

ThreadPool::ThreadPool(unsigned workers) : workers_(workers == 0 ? 1 : workers) {
  if (workers_ > 1) {
    threads_.reserve(workers_);
    for (unsigned i = 0; i < workers_; ++i) {
      threads_.emplace_back([this, i] { worker_loop(i); });
    }
  }
}

ThreadPool::~ThreadPool() {
  if (!threads_.empty()) {
    {
      std::lock_guard<std::mutex> lk(mutex_);
      stop_ = true;
    }
    start_cv_.notify_all();
    for (std::thread& t : threads_) t.join();
  }
}

void ThreadPool::parallel_for(size_t count,
                              const std::function<void(unsigned, size_t, size_t)>& fn) {
  if (count == 0) return;
  if (threads_.empty()) {
    fn(0, 0, count);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(mutex_);
    job_ = &fn;
    job_count_ = count;
    remaining_ = workers_;
    ++job_ticket_;
  }
  start_cv_.notify_all();
  std::unique_lock<std::mutex> lk(mutex_);
  done_cv_.wait(lk, [this] { return remaining_ == 0; });
  job_ = nullptr;
}

void ThreadPool::worker_loop(unsigned index) {
  uint64_t last_ticket = 0;
  for (;;) {
    const std::function<void(unsigned, size_t, size_t)>* job = nullptr;
    size_t count = 0;
    {
      std::unique_lock<std::mutex> lk(mutex_);
      start_cv_.wait(lk, [&] { return stop_ || job_ticket_ != last_ticket; });
      if (stop_) return;
      last_ticket = job_ticket_;
      job = job_;
      count = job_count_;
    }
    const size_t begin = count * index / workers_;
    const size_t end = count * (index + 1) / workers_;
    if (begin < end) (*job)(index, begin, end);
    {
      std::lock_guard<std::mutex> lk(mutex_);
      if (--remaining_ == 0) done_cv_.notify_all();
    }
  }
}

} // namespace bpsched
