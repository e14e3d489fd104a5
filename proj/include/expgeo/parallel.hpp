#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The expgeo Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

// Seeded, worker-count independent Monte Carlo reduction.
//
// Samples are split into fixed-size blocks. Block b draws from its own
// generator seeded by mixing (seed, b), so its samples do not depend on which
// worker runs it. Per-block partial sums are merged in block order, which
// makes the final estimate bit-identical for any number of workers.

#include "expgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace expgeo {

/// Monte Carlo mean with its standard error.
struct MCEstimate
{
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;

  /// |mean| <= k * stderr.
  bool consistent_with_zero(double k = 3.0) const { return std::abs(mean) <= k * standard_error; }
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` derived from a user seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream)
{
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// EXPGEO_THREADS environment variable when set.
inline unsigned resolve_workers(unsigned requested)
{
  unsigned n = requested;
  if (n == 0)
    n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EXPGEO_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0)
      n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

struct MonteCarloOptions
{
  unsigned workers = 1;          // 0 = hardware concurrency
  std::size_t block_size = 4096;
};

/// Weighted sums for the self-normalized estimator sum(w y) / sum(w).
struct WeightedSums
{
  double sw = 0.0;
  double swy = 0.0;
  double sw2 = 0.0;
  double sw2y = 0.0;
  double sw2y2 = 0.0;
  std::size_t n = 0;

  void add(double w, double y)
  {
    sw += w;
    swy += w * y;
    const double w2 = w * w;
    sw2 += w2;
    sw2y += w2 * y;
    sw2y2 += w2 * y * y;
    ++n;
  }

  void merge(const WeightedSums& o)
  {
    sw += o.sw;
    swy += o.swy;
    sw2 += o.sw2;
    sw2y += o.sw2y;
    sw2y2 += o.sw2y2;
    n += o.n;
  }

  /// Ratio estimate with delta-method standard error; reduces to the sample
  /// mean and s/sqrt(n) for unit weights.
  MCEstimate estimate() const
  {
    MCEstimate e;
    e.n = n;
    if (n == 0 || !(sw > 0.0))
      return e;
    e.mean = swy / sw;
    if (n > 1) {
      double ss = sw2y2 - 2.0 * e.mean * sw2y + e.mean * e.mean * sw2;
      ss = std::max(0.0, ss);
      const double correction = static_cast<double>(n) / static_cast<double>(n - 1);
      e.standard_error = std::sqrt(ss * correction) / sw;
    }
    return e;
  }
};

/// Runs `block_fn(block_index, begin, end, rng)` for every block of [0, n) and
/// merges the returned partial results in block order.
///
/// Partial must provide `merge(const Partial&)`.
template <class Partial, class BlockFn>
Partial run_blocks(std::size_t n, std::uint64_t seed, const MonteCarloOptions& opts,
                   BlockFn&& block_fn)
{
  if (opts.block_size == 0)
    throw DomainError("block size must be positive");
  const std::size_t n_blocks = (n + opts.block_size - 1) / opts.block_size;
  std::vector<Partial> partials(n_blocks);

  std::vector<std::exception_ptr> errors(n_blocks);
  auto run_block = [&](std::size_t b) {
    try {
      std::mt19937_64 rng(substream_seed(seed, b));
      const std::size_t begin = b * opts.block_size;
      const std::size_t end = std::min(n, begin + opts.block_size);
      partials[b] = block_fn(b, begin, end, rng);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(opts.workers), std::max<std::size_t>(1, n_blocks)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b)
      run_block(b);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < n_blocks; b += workers)
          run_block(b);
      });
    }
    for (auto& th : pool)
      th.join();
  }

  for (const auto& e : errors) {
    if (e)
      std::rethrow_exception(e);
  }

  Partial total{};
  for (const Partial& p : partials)
    total.merge(p);
  return total;
}

}  // namespace expgeo
