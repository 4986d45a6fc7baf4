// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace qilab {

// Error taxonomy, mapped to CLI exit codes (2/3/4).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; used to derive independent RNG stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream `stream` of a run with master seed `master`. Streams with
// distinct ids are statistically independent and reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Runs work(0..n_chunks-1) on a small thread pool. Chunk results must be
// written to per-chunk storage by the caller and merged in chunk order so
// the outcome does not depend on scheduling.
void parallel_chunks(int n_chunks, const std::function<void(int)>& work);

// FNV-1a, used for config hashes embedded in reports and sidecars.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace qilab
