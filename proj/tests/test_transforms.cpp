#include "sparsefact/hadamard.hpp"
#include "sparsefact/types.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <vector>

using namespace sparsefact;

TEST_SUITE("transforms") {

TEST_CASE("small orders of the Sylvester construction") {
  CHECK(hadamard(1)(0, 0) == 1.0);
  Matrix h2(2, 2);
  h2 << 1, 1, 1, -1;
  CHECK(oracles::bitwise_equal(hadamard(2), h2));
  CHECK_THROWS_AS(hadamard(0), std::invalid_argument);
  CHECK_THROWS_AS(hadamard(3), std::invalid_argument);
  CHECK_THROWS_AS(hadamard(6), std::invalid_argument);
  CHECK_THROWS_AS(hadamard(-4), std::invalid_argument);
}

TEST_CASE("rows are orthogonal with squared norm n") {
  const Matrix h = hadamard(32);
  const Matrix g = h * h.transpose();
  for (Index i = 0; i < 32; ++i)
    for (Index j = 0; j < 32; ++j)
      CHECK(g(i, j) == (i == j ? 32.0 : 0.0));
}

TEST_CASE("butterfly base case is the 2x2 transform itself") {
  const auto bf = hadamard_butterfly(2);
  REQUIRE(bf.factors.size() == 1);
  CHECK(oracles::bitwise_equal(bf.factors[0].to_dense(), hadamard(2)));
  CHECK_THROWS_AS(hadamard_butterfly(1), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_butterfly(12), std::invalid_argument);
}

TEST_CASE("each butterfly factor has two entries per row and per column") {
  const auto bf = hadamard_butterfly(32);
  REQUIRE(bf.factors.size() == 5);
  for (const CooMatrix& f : bf.factors) {
    CHECK(f.nnz() == 64);
    std::vector<int> row_count(32, 0), col_count(32, 0);
    for (const Triplet& t : f.triplets()) {
      ++row_count[t.row];
      ++col_count[t.col];
      CHECK((t.value == 1.0 || t.value == -1.0));
    }
    for (int c : row_count) CHECK(c == 2);
    for (int c : col_count) CHECK(c == 2);
  }
}

TEST_CASE("factor products reproduce every order exactly in integers") {
  for (Index n = 2; n <= 1024; n *= 2) {
    const auto bf = hadamard_butterfly(n);
    REQUIRE((static_cast<Index>(1) << bf.factors.size()) == n);
    const auto product = oracles::int_chain_product(bf.factors, n);
    const auto expect = oracles::int_hadamard(n);
    bool equal = true;
    for (Index i = 0; i < n && equal; ++i)
      for (Index j = 0; j < n && equal; ++j)
        equal = product[i][j] == expect[i][j];
    CHECK(equal);
  }
}

TEST_CASE("stored cost of the butterfly form is 2 log2(n) / n") {
  for (Index n = 4; n <= 1024; n *= 2) {
    const auto op = to_operator(hadamard_butterfly(n));
    Index log2n = 0;
    while ((Index{1} << log2n) < n) ++log2n;
    CHECK(relative_complexity(op, n, n) ==
          2.0 * static_cast<double>(log2n) / static_cast<double>(n));
  }
}

TEST_CASE("applying the stack costs at most 2 n log2(n) multiply-adds") {
  const auto op = to_operator(hadamard_butterfly(64));
  long long madds = 0;
  const Vector y = apply(op, Vector::Ones(64), &madds);
  CHECK(madds <= 2 * 64 * 6);
  CHECK(y[0] == 64.0);  // all-ones is the first basis direction scaled
}

}  // TEST_SUITE
