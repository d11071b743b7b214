#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "msfem/parallel.hpp"

using namespace msfem;

TEST_CASE("every index runs once") {
  for (int jobs : {1, 3, 0}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, jobs, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  parallel_for(0, 4, [](int) { FAIL("no iterations expected"); });
}

TEST_CASE("exceptions reach the caller") {
  CHECK_THROWS_AS(parallel_for(100, 4, [](int i) {
                    if (i == 37) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  CHECK(resolve_jobs(3) == 3);
  CHECK(resolve_jobs(0) >= 1);
}
