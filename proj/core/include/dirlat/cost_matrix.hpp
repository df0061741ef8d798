#pragma once

#include <cstdint>
#include <vector>

namespace dirlat {

using Cost = std::int64_t;

// Dense square table of non-negative integer costs, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(int size, Cost fill = 0)
      : size_(size), data_(static_cast<std::size_t>(size) * size, fill) {}

  int size() const { return size_; }

  Cost operator()(int u, int v) const { return data_[index(u, v)]; }
  Cost& operator()(int u, int v) { return data_[index(u, v)]; }

  Cost max_entry() const;

  // Shortest-path closure in place (Floyd-Warshall).
  void close_metric();

  bool operator==(const CostMatrix&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(u) * size_ + v;
  }

  int size_ = 0;
  std::vector<Cost> data_;
};

}  // namespace dirlat
