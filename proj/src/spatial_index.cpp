#include "hardcore/spatial_index.hpp"

#include <cmath>
#include <stdexcept>

namespace hardcore {

namespace {
constexpr std::size_t kMaxCells = std::size_t{1} << 22;
}

SpatialIndex::SpatialIndex(std::span<const Grain> grains, int d, const Point& lo, const Point& hi,
                           double cell_size, std::size_t max_cells_per_grain, bool clip)
    : grains_(grains), d_(d), clip_(clip), lo_(lo), cell_(cell_size) {
  if (d < 1 || d > 3) throw std::invalid_argument("spatial index supports d = 1..3");
  if (grains.size() >= UINT32_MAX) throw std::length_error("too many grains for the index");
  if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = 1.0;
  for (;;) {
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
      if (!(hi[i] > lo[i])) throw std::invalid_argument("spatial index box must have positive extent");
      dims_[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((hi[i] - lo[i]) / cell_)));
      total *= static_cast<std::size_t>(dims_[i]);
    }
    if (total <= kMaxCells) break;
    cell_ *= 2.0;
  }

  const std::size_t n = grains.size();
  const std::size_t ncells = flat({dims_[0] - 1, dims_[1] - 1, dims_[2] - 1}) + 1;
  is_overflow_.assign(n, 0);
  span_.assign(n, {0, 0, 0, 0, 0, 0});
  std::vector<std::uint32_t> count(ncells + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const Grain& g = grains[j];
    std::size_t cells = 1;
    bool inside = true, missed = false;
    for (int i = 0; i < d; ++i) {
      double a = std::floor((g.center[i] - g.radius - lo_[i]) / cell_);
      double b = std::floor((g.center[i] + g.radius - lo_[i]) / cell_);
      const double top = static_cast<double>(dims_[i] - 1);
      if (clip_) {
        if (b < 0.0 || a > top) {
          missed = true;
          break;
        }
        a = std::max(a, 0.0);
        b = std::min(b, top);
      } else if (!(a >= 0.0 && b <= top)) {
        inside = false;
        break;
      }
      span_[j][i] = static_cast<std::int64_t>(a);
      span_[j][i + 3] = static_cast<std::int64_t>(b);
      cells *= static_cast<std::size_t>(b - a + 1.0);
      if (cells > max_cells_per_grain) {
        inside = false;
        break;
      }
    }
    if (missed) {
      span_[j] = {0, 0, 0, -1, -1, -1};
      continue;
    }
    if (!inside) {
      is_overflow_[j] = 1;
      overflow_.push_back(static_cast<std::uint32_t>(j));
      continue;
    }
    const auto& s = span_[j];
    for (std::int64_t c2 = s[2]; c2 <= s[5]; ++c2)
      for (std::int64_t c1 = s[1]; c1 <= s[4]; ++c1)
        for (std::int64_t c0 = s[0]; c0 <= s[3]; ++c0) ++count[flat({c0, c1, c2}) + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) count[c + 1] += count[c];
  start_ = count;
  members_.resize(start_.back());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (is_overflow_[j]) continue;
    const auto& s = span_[j];
    for (std::int64_t c2 = s[2]; c2 <= s[5]; ++c2)
      for (std::int64_t c1 = s[1]; c1 <= s[4]; ++c1)
        for (std::int64_t c0 = s[0]; c0 <= s[3]; ++c0)
          members_[fill[flat({c0, c1, c2})]++] = static_cast<std::uint32_t>(j);
  }
}

bool SpatialIndex::cell_of(const Point& x, std::array<std::int64_t, 3>& idx) const {
  idx = {0, 0, 0};
  for (int i = 0; i < d_; ++i) {
    const double c = std::floor((x[i] - lo_[i]) / cell_);
    if (!(c >= 0.0 && c < static_cast<double>(dims_[i]))) return false;
    idx[i] = static_cast<std::int64_t>(c);
  }
  return true;
}

std::size_t SpatialIndex::flat(const std::array<std::int64_t, 3>& idx) const {
  return static_cast<std::size_t>((idx[2] * dims_[1] + idx[1]) * dims_[0] + idx[0]);
}

bool SpatialIndex::contains(std::size_t j, const Point& x) const {
  const Grain& g = grains_[j];
  double dist2 = 0.0;
  for (int i = 0; i < d_; ++i) {
    const double delta = x[i] - g.center[i];
    dist2 += delta * delta;
  }
  return dist2 <= g.radius * g.radius;
}

bool SpatialIndex::covered(const Point& x) const {
  std::array<std::int64_t, 3> idx;
  if (cell_of(x, idx)) {
    const std::size_t c = flat(idx);
    for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k)
      if (contains(members_[k], x)) return true;
  }
  for (std::uint32_t j : overflow_)
    if (contains(j, x)) return true;
  return false;
}

}  // namespace hardcore
