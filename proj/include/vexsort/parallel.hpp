// Task-parallel driver: one interval list per worker, used as a stack by its
// owner and stolen from the opposite end by neighbours in id-distance order.
// Workers spin between an idle counter and the shared queue count; a worker
// is only ever counted idle while it holds no task, so the exit condition
// (all idle, all lists empty) cannot fire while work is in flight.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "vexsort/sort.hpp"

namespace vexsort {

struct ParallelStats {
  std::atomic<std::uint64_t> inserted{0};
  std::atomic<std::uint64_t> acquired{0};
  std::atomic<std::uint64_t> partition_steps{0};
};

// Visiting sequence i, i+1, i-1, i+2, i-2, ... modulo the worker count;
// every index exactly once, distances non-decreasing.
inline std::vector<std::size_t> steal_order(std::size_t worker,
                                            std::size_t workers) {
  std::vector<std::size_t> order;
  order.reserve(workers);
  const auto push_unique = [&order](std::size_t idx) {
    for (std::size_t seen : order) {
      if (seen == idx) return;
    }
    order.push_back(idx);
  };
  push_unique(worker % workers);
  for (std::size_t d = 1; order.size() < workers; ++d) {
    push_unique((worker + d) % workers);
    if (order.size() == workers) break;
    push_unique((worker + workers - d % workers) % workers);
  }
  return order;
}

class BucketSet {
 public:
  explicit BucketSet(std::size_t workers) {
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    lists_.reserve(workers);
    orders_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
      lists_.push_back(std::make_unique<Slot>());
      orders_.push_back(steal_order(i, workers));
    }
  }

  std::size_t workers() const { return lists_.size(); }

  void insert(std::size_t worker, Interval itv) {
    {
      Slot& s = *lists_[worker];
      const std::lock_guard<std::mutex> lock(s.m);
      s.q.push_back(itv);
    }
    queued_.fetch_add(1, std::memory_order_release);
  }

  // Own list first (most recently pushed), then victims in steal order from
  // their oldest end.
  std::optional<Interval> steal_task(std::size_t worker) {
    {
      Slot& s = *lists_[worker];
      const std::lock_guard<std::mutex> lock(s.m);
      if (!s.q.empty()) {
        const Interval t = s.q.back();
        s.q.pop_back();
        queued_.fetch_sub(1, std::memory_order_relaxed);
        return t;
      }
    }
    for (std::size_t k = 1; k < orders_[worker].size(); ++k) {
      Slot& s = *lists_[orders_[worker][k]];
      const std::lock_guard<std::mutex> lock(s.m);
      if (!s.q.empty()) {
        const Interval t = s.q.front();
        s.q.pop_front();
        queued_.fetch_sub(1, std::memory_order_relaxed);
        return t;
      }
    }
    return std::nullopt;
  }

  bool any_queued() const {
    return queued_.load(std::memory_order_acquire) != 0;
  }

  std::size_t idle_count() const {
    return idle_.load(std::memory_order_acquire);
  }
  void mark_idle() { idle_.fetch_add(1, std::memory_order_acq_rel); }
  void mark_active() { idle_.fetch_sub(1, std::memory_order_acq_rel); }

 private:
  struct Slot {
    std::mutex m;
    std::deque<Interval> q;
  };

  std::vector<std::unique_ptr<Slot>> lists_;
  std::vector<std::vector<std::size_t>> orders_;
  std::atomic<std::size_t> queued_{0};
  std::atomic<std::size_t> idle_{0};
};

// One scheduling step: intervals at most l1_bytes large are sorted
// sequentially; larger ones are partitioned, the right side goes onto the
// worker's own list and the loop continues on the left.
template <class B, class View>
void core_step(const B& b, const View& view, Interval itv, BucketSet& buckets,
               std::size_t worker, const SortConfig& config,
               ParallelStats* stats = nullptr) {
  using T = typename B::value_type;
  constexpr std::size_t bytes_per = element_traits<T>::memory_bytes;
  Interval cur = itv;
  while (cur.length() * bytes_per > config.l1_bytes) {
    const detail::Split s = detail::split_interval(b, view, cur, nullptr);
    if (stats != nullptr) {
      stats->partition_steps.fetch_add(1, std::memory_order_relaxed);
    }
    if (!s.right_done) {
      buckets.insert(worker, s.right);
      if (stats != nullptr) {
        stats->inserted.fetch_add(1, std::memory_order_relaxed);
      }
    }
    cur = s.left;
  }
  if (!cur.empty()) sort_interval(b, view, cur, config, nullptr);
}

template <class B, class View>
void worker_loop(const B& b, const View& view, BucketSet& buckets,
                 std::size_t worker, const SortConfig& config,
                 ParallelStats* stats = nullptr) {
  const std::size_t nworkers = buckets.workers();
  bool idle = false;
  for (;;) {
    if (idle) {
      if (!buckets.any_queued()) {
        if (buckets.idle_count() == nworkers && !buckets.any_queued()) break;
        std::this_thread::yield();
        continue;
      }
      buckets.mark_active();  // leave idle before taking anything
      idle = false;
    }
    const std::optional<Interval> task = buckets.steal_task(worker);
    if (task.has_value()) {
      if (stats != nullptr) {
        stats->acquired.fetch_add(1, std::memory_order_relaxed);
      }
      core_step(b, view, *task, buckets, worker, config, stats);
      continue;
    }
    idle = true;
    buckets.mark_idle();
  }
}

// Same contract as sort(); the array is cut into disjoint intervals so
// workers never touch overlapping elements.
template <class B, class View>
void parallel_sort(const B& b, const View& view, const SortConfig& config = {},
                   ParallelStats* stats = nullptr) {
  static_assert(
      std::is_same_v<typename B::value_type, typename View::value_type>);
  validate(config);
  if (view.size() <= 1) return;

  BucketSet buckets(config.workers);
  const auto work = [&](std::size_t id) {
    if (id == 0) {
      core_step(b, view, Interval{0, view.size()}, buckets, 0, config, stats);
    }
    worker_loop(b, view, buckets, id, config, stats);
  };

  if (config.workers == 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(config.workers);
  for (std::size_t id = 0; id < config.workers; ++id) {
    threads.emplace_back(work, id);
  }
}

}  // namespace vexsort
