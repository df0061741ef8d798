#include "dirlat/cost_matrix.hpp"

#include <algorithm>

namespace dirlat {

Cost CostMatrix::max_entry() const {
  Cost best = 0;
  for (Cost c : data_) best = std::max(best, c);
  return best;
}

void CostMatrix::close_metric() {
  for (int k = 0; k < size_; ++k) {
    for (int u = 0; u < size_; ++u) {
      const Cost uk = (*this)(u, k);
      for (int v = 0; v < size_; ++v) {
        const Cost via = uk + (*this)(k, v);
        if (via < (*this)(u, v)) (*this)(u, v) = via;
      }
    }
  }
}

}  // namespace dirlat
