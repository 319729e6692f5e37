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

#include "stmc/threadpool.h"

#include <algorithm>
#include <cstdlib>

namespace stmc {

namespace {

// Chunk c of [0,n) split into k near-equal contiguous ranges.
void chunk_range(std::int64_t n, int k, int c, std::int64_t* begin, std::int64_t* end) {
  std::int64_t base = n / k;
  std::int64_t rem = n % k;
  *begin = c * base + std::min<std::int64_t>(c, rem);
  *end = *begin + base + (c < rem ? 1 : 0);
}

}  // namespace

ThreadPool::ThreadPool(int num_threads) {
  int extra = std::max(0, num_threads - 1);
  workers_.reserve(static_cast<size_t>(extra));
  for (int i = 0; i < extra; ++i) {
    workers_.emplace_back([this, i] { worker_loop(i + 1); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_start_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::parallel_for(
    std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  int chunks = std::min<std::int64_t>(n, num_threads());
  if (chunks == 1 || workers_.empty()) {
    fn(0, n);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    job_.fn = &fn;
    job_.n = n;
    job_.chunks = chunks;
    job_.epoch++;
    pending_ = chunks - 1;  // workers run chunks 1..chunks-1
  }
  cv_start_.notify_all();

  std::int64_t b, e;
  chunk_range(n, chunks, 0, &b, &e);
  fn(b, e);

  std::unique_lock<std::mutex> lock(mu_);
  cv_done_.wait(lock, [this] { return pending_ == 0; });
  job_.fn = nullptr;
}

void ThreadPool::worker_loop(int worker_id) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::int64_t, std::int64_t)>* fn = nullptr;
    std::int64_t n = 0;
    int chunks = 0;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_start_.wait(lock, [&] { return stop_ || (job_.fn && job_.epoch != seen); });
      if (stop_) return;
      seen = job_.epoch;
      fn = job_.fn;
      n = job_.n;
      chunks = job_.chunks;
    }
    if (worker_id < chunks) {
      std::int64_t b, e;
      chunk_range(n, chunks, worker_id, &b, &e);
      (*fn)(b, e);
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (worker_id < chunks) --pending_;
      // Workers beyond the chunk count were never counted as pending.
      if (pending_ == 0) cv_done_.notify_one();
    }
  }
}

ThreadPool& ThreadPool::global() {
  static ThreadPool pool([] {
    if (const char* env = std::getenv("STMC_THREADS")) {
      int n = std::atoi(env);
      if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(4u, hw ? hw : 1u));
  }());
  return pool;
}

}  // namespace stmc
