#include "sparsefact/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparsefact {

std::vector<Index> Rng::sample_without_replacement(Index n, Index k) {
  if (k < 0 || k > n)
    throw std::invalid_argument("sample_without_replacement: bad count");
  std::vector<Index> pool(n);
  for (Index i = 0; i < n; ++i) pool[i] = i;
  for (Index i = 0; i < k; ++i) {
    const Index j = i + uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sparsefact
