// Bounded thread fan-out for batch commands.  Results land in input order,
// so serialized reports do not depend on scheduling.
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bumplab {

// Worker count for a batch of `jobs` items: hardware concurrency, capped by
// the BUMPLAB_THREADS environment variable when it parses to a positive
// integer, and never more than one thread per job.
inline unsigned thread_budget(std::size_t jobs) {
  unsigned budget = std::thread::hardware_concurrency();
  if (budget == 0) budget = 1;
  if (const char* env = std::getenv("BUMPLAB_THREADS")) {
    try {
      const long parsed = std::stol(env);
      if (parsed >= 1) budget = static_cast<unsigned>(parsed);
    } catch (const std::exception&) {
      // Unparseable values fall back to the hardware count.
    }
  }
  if (jobs < budget) budget = static_cast<unsigned>(jobs);
  return budget == 0 ? 1 : budget;
}

// Applies fn to every item, possibly concurrently, and returns the results
// indexed like the input.  The first exception thrown by any worker is
// rethrown on the calling thread after all workers finish.
template <class Item, class Fn>
auto thread_map(const std::vector<Item>& items, Fn fn)
    -> std::vector<decltype(fn(items.front()))> {
  using Result = decltype(fn(items.front()));
  std::vector<Result> results(items.size());
  if (items.empty()) return results;

  const unsigned workers = thread_budget(items.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        results[i] = fn(items[i]);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true))
          first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(first_error);
  return results;
}

}  // namespace bumplab
