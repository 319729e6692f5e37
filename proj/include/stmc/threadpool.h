// Copyright 2026 STMC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STMC_THREADPOOL_H_
#define STMC_THREADPOOL_H_

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stmc {

// Persistent worker pool for data-parallel tensor kernels. Ranges are split
// into fixed contiguous chunks, so results do not depend on scheduling order
// as long as chunks write disjoint outputs.
class ThreadPool {
 public:
  explicit ThreadPool(int num_threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int num_threads() const { return static_cast<int>(workers_.size()) + 1; }

  // Runs fn(begin, end) over [0,n) split into one chunk per thread.
  // The calling thread participates. Blocks until all chunks finish.
  void parallel_for(std::int64_t n,
                    const std::function<void(std::int64_t, std::int64_t)>& fn);

  // Process-wide pool; size from STMC_THREADS env var, else
  // min(4, hardware_concurrency).
  static ThreadPool& global();

 private:
  void worker_loop(int worker_id);

  struct Job {
    const std::function<void(std::int64_t, std::int64_t)>* fn = nullptr;
    std::int64_t n = 0;
    int chunks = 0;
    std::uint64_t epoch = 0;
  };

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  Job job_;
  int pending_ = 0;
  bool stop_ = false;
};

// Convenience wrapper around the global pool.
inline void parallel_for(std::int64_t n,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
  ThreadPool::global().parallel_for(n, fn);
}

}  // namespace stmc

#endif  // STMC_THREADPOOL_H_
