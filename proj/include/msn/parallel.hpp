#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace msn
{

/// Runs fn(block_index, begin, end) for each block of [0, count). Blocks are
/// claimed dynamically by up to `workers` threads (0: hardware concurrency);
/// results must only depend on the block index.
template <class Index, class Fn>
void for_each_block(Index count, Index block, unsigned workers, Fn&& fn)
{
  if (count <= 0)
    return;
  const auto blocks = static_cast<std::uint64_t>((count + block - 1) / block);
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  auto run_one = [&](std::uint64_t b) {
    const Index begin = static_cast<Index>(b) * block;
    const Index end = std::min(count, begin + block);
    fn(b, begin, end);
  };

  if (workers <= 1)
  {
    for (std::uint64_t b = 0; b < blocks; ++b)
      run_one(b);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
  {
    pool.emplace_back([&, w] {
      try
      {
        for (std::uint64_t b = next++; b < blocks; b = next++)
          run_one(b);
      }
      catch (...)
      {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

}  // namespace msn
