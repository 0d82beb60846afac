#include "rfssm/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>

namespace rfssm {

struct Executor::Task {
  int n = 0;
  int grain = 1;
  const std::function<void(int)>* fn = nullptr;
  std::atomic<int> cursor{0};
  std::atomic<int> active{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  void run_chunks() {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const int begin = cursor.fetch_add(grain);
      if (begin >= n) return;
      const int end = std::min(n, begin + grain);
      try {
        for (int i = begin; i < end; ++i) (*fn)(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  }
};

Executor::Executor(int threads) {
  const int n = std::max(1, threads);
  workers_.reserve(n - 1);
  for (int i = 0; i < n - 1; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Executor::~Executor() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
}

void Executor::parallel_for(int n, const std::function<void(int)>& fn, int grain) {
  if (n <= 0) return;
  if (workers_.empty() || n <= grain) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  Task task;
  task.n = n;
  task.grain = std::max(1, grain);
  task.fn = &fn;
  {
    std::lock_guard lock(mutex_);
    task_ = &task;
  }
  wake_.notify_all();

  task.run_chunks();  // the calling thread participates

  {
    std::unique_lock lock(mutex_);
    task_ = nullptr;
    done_.wait(lock, [&] { return task.active.load() == 0; });
  }
  if (task.failed.load()) std::rethrow_exception(task.error);
}

void Executor::worker_loop() {
  for (;;) {
    Task* task = nullptr;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || task_ != nullptr; });
      if (stop_) return;
      task = task_;
      task->active.fetch_add(1);
    }
    task->run_chunks();
    {
      std::lock_guard lock(mutex_);
      if (task->active.fetch_sub(1) == 1) done_.notify_all();
    }
  }
}

void parallel_for(Executor* exec, int n, const std::function<void(int)>& fn,
                  int grain) {
  if (exec == nullptr) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  exec->parallel_for(n, fn, grain);
}

int resolve_thread_count(int requested) {
  if (const char* env = std::getenv("RFSSM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace rfssm
