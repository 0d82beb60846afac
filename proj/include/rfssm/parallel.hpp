#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rfssm {

// Minimal persistent worker pool. Work items are index ranges; scheduling is
// a shared atomic cursor with fixed grain, so results never depend on the
// thread count (callers must keep per-index work independent).
class Executor {
 public:
  explicit Executor(int threads);
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  int thread_count() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(i) for every i in [0, n), blocking until all complete. fn must
  // not throw across threads; exceptions are rethrown on the calling thread
  // when raised inline.
  void parallel_for(int n, const std::function<void(int)>& fn, int grain = 1);

 private:
  struct Task;
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  Task* task_ = nullptr;
  bool stop_ = false;
};

// Convenience wrapper: runs inline when exec is null.
void parallel_for(Executor* exec, int n, const std::function<void(int)>& fn,
                  int grain = 1);

// Resolves a requested thread count: 0 means all hardware threads; the
// RFSSM_THREADS environment variable overrides everything.
int resolve_thread_count(int requested);

}  // namespace rfssm
