#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardcore/kernels.hpp"

namespace hardcore {

/// Uniform hash grid over a box. Each grain is stored in every cell its
/// bounding box touches; grains that would touch too many cells or stick
/// out of the grid go to an overflow list that is scanned linearly.
///
/// With `clip` set, bounding boxes are clipped to the grid instead and
/// grains missing the grid are dropped. Coverage queries are then exact
/// only for points inside the box, and pair enumeration is unavailable.
class SpatialIndex {
 public:
  using Point = std::array<double, 3>;

  SpatialIndex(std::span<const Grain> grains, int d, const Point& lo, const Point& hi,
               double cell_size, std::size_t max_cells_per_grain = 4096, bool clip = false);

  int dimension() const { return d_; }
  double cell_size() const { return cell_; }
  std::size_t overflow_count() const { return overflow_.size(); }

  /// Calls f(j) for every grain whose closed ball contains x.
  template <class F>
  void for_each_covering(const Point& x, F&& f) const;

  /// True iff some grain's closed ball contains x.
  bool covered(const Point& x) const;

  /// Calls f(i, j) once for every unordered pair i < j of grains whose closed
  /// balls intersect.
  template <class F>
  void for_each_neighbor_pair(F&& f) const;

 private:
  bool cell_of(const Point& x, std::array<std::int64_t, 3>& idx) const;
  std::size_t flat(const std::array<std::int64_t, 3>& idx) const;
  bool contains(std::size_t j, const Point& x) const;

  std::span<const Grain> grains_;
  int d_;
  bool clip_ = false;
  Point lo_{};
  double cell_;
  std::array<std::int64_t, 3> dims_{1, 1, 1};
  std::vector<std::uint32_t> start_;    // CSR offsets, one per cell plus one
  std::vector<std::uint32_t> members_;  // grain ids per cell
  std::vector<std::uint32_t> overflow_;
  std::vector<char> is_overflow_;
  // Cell box of each gridded grain, lo and hi inclusive.
  std::vector<std::array<std::int64_t, 6>> span_;
};

template <class F>
void SpatialIndex::for_each_covering(const Point& x, F&& f) const {
  std::array<std::int64_t, 3> idx;
  if (cell_of(x, idx)) {
    const std::size_t c = flat(idx);
    for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k)
      if (contains(members_[k], x)) f(static_cast<std::size_t>(members_[k]));
  }
  for (std::uint32_t j : overflow_)
    if (contains(j, x)) f(static_cast<std::size_t>(j));
}

template <class F>
void SpatialIndex::for_each_neighbor_pair(F&& f) const {
  if (clip_) throw std::logic_error("pair enumeration needs an unclipped index");
  const std::size_t n = grains_.size();
  std::vector<std::uint32_t> stamp(n, UINT32_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_overflow_[i]) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || (is_overflow_[j] && j < i)) continue;
        if (are_neighbors(grains_[i], grains_[j], d_)) f(std::min(i, j), std::max(i, j));
      }
      continue;
    }
    const auto& s = span_[i];
    for (std::int64_t c2 = s[2]; c2 <= s[5]; ++c2)
      for (std::int64_t c1 = s[1]; c1 <= s[4]; ++c1)
        for (std::int64_t c0 = s[0]; c0 <= s[3]; ++c0) {
          const std::size_t c = flat({c0, c1, c2});
          for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) {
            const std::uint32_t j = members_[k];
            if (j <= i || stamp[j] == i) continue;
            stamp[j] = static_cast<std::uint32_t>(i);
            if (are_neighbors(grains_[i], grains_[j], d_)) f(i, static_cast<std::size_t>(j));
          }
        }
  }
}

}  // namespace hardcore
