#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>
#include <vector>

#include "vexsort/parallel.hpp"

using vexsort::BucketSet;
using vexsort::Interval;
using vexsort::KeyValue;
using vexsort::ParallelStats;
using vexsort::SliceView;
using vexsort::SortConfig;
using vexsort::VectorBackend;

namespace {

std::vector<std::int32_t> random_ints(std::size_t n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<std::int32_t> data(n);
  for (auto& v : data) v = static_cast<std::int32_t>(rng());
  return data;
}

}  // namespace

TEST_CASE("steal_order visits every id once, closest first") {
  CHECK(vexsort::steal_order(2, 4) == std::vector<std::size_t>{2, 3, 1, 0});
  CHECK(vexsort::steal_order(0, 8) ==
        std::vector<std::size_t>{0, 1, 7, 2, 6, 3, 5, 4});
  CHECK(vexsort::steal_order(0, 1) == std::vector<std::size_t>{0});
  CHECK(vexsort::steal_order(1, 2) == std::vector<std::size_t>{1, 0});

  for (std::size_t workers : {2u, 3u, 5u, 8u, 16u}) {
    for (std::size_t id = 0; id < workers; ++id) {
      const auto order = vexsort::steal_order(id, workers);
      REQUIRE(order.size() == workers);
      std::vector<bool> seen(workers, false);
      std::size_t prev_dist = 0;
      for (std::size_t v : order) {
        REQUIRE(!seen[v]);
        seen[v] = true;
        const std::size_t fwd = (v + workers - id) % workers;
        const std::size_t dist = std::min(fwd, workers - fwd);
        REQUIRE(dist >= prev_dist);
        prev_dist = dist;
      }
    }
  }
}

TEST_CASE("own list behaves as a stack, victims are robbed of their oldest task") {
  BucketSet buckets(3);
  buckets.insert(0, Interval{0, 10});
  buckets.insert(0, Interval{10, 20});
  buckets.insert(0, Interval{20, 30});

  // owner pops the most recent push
  auto t = buckets.steal_task(0);
  REQUIRE(t.has_value());
  CHECK(*t == Interval{20, 30});

  // worker 1 visits 2 (empty) then 0 and takes its oldest interval
  t = buckets.steal_task(1);
  REQUIRE(t.has_value());
  CHECK(*t == Interval{0, 10});

  t = buckets.steal_task(2);
  REQUIRE(t.has_value());
  CHECK(*t == Interval{10, 20});

  CHECK(!buckets.steal_task(0).has_value());
  CHECK(!buckets.steal_task(1).has_value());
  CHECK(!buckets.any_queued());
}

TEST_CASE("core_step sorts small intervals without touching the buckets") {
  VectorBackend<std::int32_t> b(16);
  BucketSet buckets(1);
  ParallelStats stats;
  SortConfig config;
  std::vector<std::int32_t> data = random_ints(1024, 5);
  std::vector<std::int32_t> expect = data;
  std::sort(expect.begin(), expect.end());

  core_step(b, SliceView<std::int32_t>{data.data(), data.size()},
            Interval{0, data.size()}, buckets, 0, config, &stats);
  CHECK(data == expect);
  CHECK(stats.inserted.load() == 0);
  CHECK(!buckets.any_queued());

  core_step(b, SliceView<std::int32_t>{data.data(), data.size()},
            Interval{7, 7}, buckets, 0, config, &stats);
  CHECK(data == expect);
}

TEST_CASE("core_step inserts exactly one interval per partitioning step") {
  VectorBackend<std::int32_t> b(16);
  BucketSet buckets(1);
  ParallelStats stats;
  SortConfig config;
  std::vector<std::int32_t> data = random_ints(1000000, 9);
  std::vector<std::int32_t> expect = data;
  std::sort(expect.begin(), expect.end());
  const SliceView<std::int32_t> view{data.data(), data.size()};

  core_step(b, view, Interval{0, data.size()}, buckets, 0, config, &stats);
  CHECK(stats.partition_steps.load() > 0);
  CHECK(stats.inserted.load() == stats.partition_steps.load());

  // Drain the produced intervals single-threaded, logging every interval
  // that crossed the buckets. Any two handed-out intervals must be disjoint
  // unless the later one descends from (nests inside) the earlier one.
  std::vector<Interval> handed_out;
  while (auto task = buckets.steal_task(0)) {
    handed_out.push_back(*task);
    core_step(b, view, *task, buckets, 0, config, &stats);
  }
  CHECK(data == expect);
  CHECK(stats.inserted.load() == stats.partition_steps.load());

  for (std::size_t j = 1; j < handed_out.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const Interval a = handed_out[i];
      const Interval c = handed_out[j];
      const bool disjoint = a.end <= c.start || c.end <= a.start;
      const bool nested = a.start <= c.start && c.end <= a.end;
      REQUIRE((disjoint || nested));
    }
  }
}

TEST_CASE("degenerate sizes terminate under many workers") {
  VectorBackend<std::int32_t> b(4);
  SortConfig config;
  config.workers = 4;
  std::vector<std::int32_t> none;
  vexsort::parallel_sort(b, SliceView<std::int32_t>{none.data(), 0}, config);
  std::vector<std::int32_t> one = {9};
  vexsort::parallel_sort(b, SliceView<std::int32_t>{one.data(), 1}, config);
  CHECK(one == std::vector<std::int32_t>{9});
  std::vector<std::int32_t> two = {4, 2};
  vexsort::parallel_sort(b, SliceView<std::int32_t>{two.data(), 2}, config);
  CHECK(two == std::vector<std::int32_t>{2, 4});
}

TEST_CASE("workers=1 reproduces the sequential sort exactly") {
  VectorBackend<std::int32_t> b(16);
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    std::vector<std::int32_t> par = random_ints(200000, seed);
    std::vector<std::int32_t> seq = par;
    SortConfig config;
    config.workers = 1;
    vexsort::parallel_sort(b, SliceView<std::int32_t>{par.data(), par.size()},
                           config);
    vexsort::sort(b, SliceView<std::int32_t>{seq.data(), seq.size()});
    REQUIRE(par == seq);
  }
}

TEST_CASE("parallel sorts match the host sort for several worker counts") {
  VectorBackend<std::int32_t> b(16);
  for (std::size_t workers : {2u, 4u, 8u}) {
    for (std::uint32_t seed = 0; seed < 4; ++seed) {
      std::vector<std::int32_t> data = random_ints(300000, 31 * workers + seed);
      std::vector<std::int32_t> expect = data;
      std::sort(expect.begin(), expect.end());
      SortConfig config;
      config.workers = workers;
      ParallelStats stats;
      vexsort::parallel_sort(
          b, SliceView<std::int32_t>{data.data(), data.size()}, config, &stats);
      REQUIRE(data == expect);
      REQUIRE(stats.inserted.load() == stats.acquired.load());
    }
  }
}

TEST_CASE("all-equal input terminates and stays unchanged under 8 workers") {
  VectorBackend<std::int32_t> b(16);
  std::vector<std::int32_t> data(500000, 3);
  SortConfig config;
  config.workers = 8;
  vexsort::parallel_sort(b, SliceView<std::int32_t>{data.data(), data.size()},
                         config);
  CHECK(std::count(data.begin(), data.end(), 3) ==
        static_cast<std::ptrdiff_t>(data.size()));
}

TEST_CASE("output is invariant across worker counts, payloads included") {
  VectorBackend<KeyValue> b(8);
  const std::size_t n = 120000;
  std::mt19937 rng(77);
  std::vector<KeyValue> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = {static_cast<std::int32_t>(rng() % 5000),
               static_cast<std::int32_t>(i)};
  }
  std::vector<KeyValue> reference;
  for (std::size_t workers : {1u, 2u, 4u, 8u}) {
    std::vector<KeyValue> data = base;
    SortConfig config;
    config.workers = workers;
    vexsort::parallel_sort(b, vexsort::KvAosView{data.data(), n}, config);
    for (std::size_t i = 1; i < n; ++i) REQUIRE(data[i - 1].key <= data[i].key);
    if (reference.empty()) {
      reference = data;
    } else {
      REQUIRE(data == reference);
    }
  }
}

TEST_CASE("an idle worker picks up work inserted later") {
  VectorBackend<std::int32_t> b(4);
  std::vector<std::int32_t> data = {5, 4, 3, 2, 1, 0, 9, 8, 7, 6};
  const SliceView<std::int32_t> view{data.data(), data.size()};
  BucketSet buckets(2);
  SortConfig config;
  ParallelStats stats;

  std::thread worker([&] { worker_loop(b, view, buckets, 1, config, &stats); });

  // wait for the worker to declare itself idle, then hand it work
  while (buckets.idle_count() != 1) std::this_thread::yield();
  buckets.insert(0, Interval{0, data.size()});
  buckets.mark_idle();  // this thread plays worker 0 and stays idle
  worker.join();

  CHECK(std::is_sorted(data.begin(), data.end()));
  CHECK(stats.acquired.load() == 1);
  CHECK(!buckets.any_queued());
}

TEST_CASE("parallel kv sort keeps payloads with their keys") {
  VectorBackend<KeyValue> b(16);
  const std::size_t n = 200000;
  std::mt19937 rng(123);
  std::vector<std::int32_t> keys(n);
  std::vector<std::int32_t> payloads(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = static_cast<std::int32_t>(rng());
    payloads[i] = static_cast<std::int32_t>(i);
  }
  const std::vector<std::int32_t> original_keys = keys;
  SortConfig config;
  config.workers = 4;
  vexsort::parallel_sort(b, vexsort::KvSoaView{keys.data(), payloads.data(), n},
                         config);
  std::vector<std::int32_t> expect = original_keys;
  std::sort(expect.begin(), expect.end());
  REQUIRE(keys == expect);
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(original_keys[static_cast<std::size_t>(payloads[i])] == keys[i]);
  }
}
