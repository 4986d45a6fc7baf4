// SPDX-License-Identifier: Apache-2.0
#include "qilab/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace qilab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream + 0x5851f42d4c957f2dULL));
}

void parallel_chunks(int n_chunks, const std::function<void(int)>& work) {
  if (n_chunks <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int n_threads = std::max(1, std::min<int>(hw ? hw : 1, n_chunks));
  if (n_threads == 1) {
    for (int c = 0; c < n_chunks; ++c) work(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) return;
        work(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qilab
