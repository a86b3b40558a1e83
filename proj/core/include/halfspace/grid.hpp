#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace halfspace {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Axis-aligned box in R^d.
struct Box {
  std::vector<std::array<double, 2>> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  static Box cube(int dim, double lo, double hi);
};

/// Regular tensor grid over a Box. Points are addressed by a flat index with
/// the last axis varying fastest.
struct GridSpec {
  Box box;
  std::vector<int> resolution;  // points per axis, each >= 2

  int dim() const { return box.dim(); }
  std::size_t point_count() const;
  double coord(int axis, int index) const;
  std::vector<double> point(std::size_t flat) const;
  void decompose(std::size_t flat, std::vector<int>& idx) const;

  static GridSpec uniform(const Box& b, int points_per_axis);
};

/// Number of worker threads honoring the HALFSPACE_THREADS environment cap.
int max_threads();

/// Applies fn(i) for each i in [0, n). Partitioning is deterministic; fn must
/// not depend on evaluation order across indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Chunked variant for reductions: fn(chunk, begin, end) runs per chunk and
/// the caller combines per-chunk accumulators in chunk order. Chunk
/// boundaries depend only on n, never on the thread count, so reductions
/// whose combine step is index-ordered are bitwise reproducible.
void parallel_for_chunked(
    std::size_t n,
    const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& fn);

std::size_t parallel_chunk_count(std::size_t n);

}  // namespace halfspace
