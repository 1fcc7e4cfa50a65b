#ifndef CAPSIM_SRC_PARALLEL_HPP
#define CAPSIM_SRC_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace capsim::detail {

// Static block partition of [0, n) over nthreads; results must not depend on
// the partition (each index writes its own slot), so thread count does not
// affect output bits.
template <typename Fn>
void parallel_for(std::size_t n, int nthreads, Fn&& fn) {
  if (nthreads < 1) nthreads = 1;
  if (nthreads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 1; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(chunk, n); ++i) fn(i);
  for (auto& th : pool) th.join();
}

}  // namespace capsim::detail

#endif
