#include "halfspace/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace halfspace {

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.axes.assign(static_cast<std::size_t>(dim), {lo, hi});
  return b;
}

GridSpec GridSpec::uniform(const Box& b, int points_per_axis) {
  GridSpec g;
  g.box = b;
  g.resolution.assign(b.axes.size(), points_per_axis);
  return g;
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (int r : resolution) {
    if (r < 2) throw std::invalid_argument("grid resolution must be >= 2 per axis");
    n *= static_cast<std::size_t>(r);
  }
  return n;
}

double GridSpec::coord(int axis, int index) const {
  const auto& ax = box.axes[static_cast<std::size_t>(axis)];
  const int r = resolution[static_cast<std::size_t>(axis)];
  return ax[0] + (ax[1] - ax[0]) * static_cast<double>(index) / static_cast<double>(r - 1);
}

void GridSpec::decompose(std::size_t flat, std::vector<int>& idx) const {
  const int d = dim();
  idx.resize(static_cast<std::size_t>(d));
  for (int a = d - 1; a >= 0; --a) {
    const std::size_t r = static_cast<std::size_t>(resolution[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % r);
    flat /= r;
  }
}

std::vector<double> GridSpec::point(std::size_t flat) const {
  std::vector<int> idx;
  decompose(flat, idx);
  std::vector<double> p(idx.size());
  for (int a = 0; a < dim(); ++a) p[static_cast<std::size_t>(a)] = coord(a, idx[static_cast<std::size_t>(a)]);
  return p;
}

int max_threads() {
  if (const char* env = std::getenv("HALFSPACE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min<long>(v, 64));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp<unsigned>(hw == 0 ? 1 : hw, 1, 16));
}

namespace {

constexpr std::size_t kSerialCutoff = 4096;
constexpr std::size_t kChunkTarget = 64;  // chunk layout depends only on n

void run_chunks(std::size_t n,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = parallel_chunk_count(n);
  if (chunks <= 1) {
    if (n > 0) fn(0, 0, n);
    return;
  }
  const int workers = std::min<int>(max_threads(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, n * c / chunks, n * (c + 1) / chunks);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) break;
        try {
          fn(c, n * c / chunks, n * (c + 1) / chunks);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::size_t parallel_chunk_count(std::size_t n) {
  if (n == 0) return 0;
  if (n <= kSerialCutoff) return 1;
  return std::min<std::size_t>(kChunkTarget, n);
}

void parallel_for_chunked(
    std::size_t n,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  run_chunks(n, fn);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  run_chunks(n, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace halfspace
