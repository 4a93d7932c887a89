#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tempheno/tensor.hpp"

using namespace tempheno;
using namespace tempheno::testing;

namespace {

IrregularTensor single(const Matrix& m) {
  IrregularTensor x;
  x.matrices = {m};
  x.feature_names = numbered("f", m.rows());
  x.individual_ids = {"a"};
  return x;
}

}  // namespace

TEST_CASE("validate_tensor accepts a binary matrix") {
  const auto result = validate_tensor(single(Matrix::from_rows({{1, 0}, {0, 1}})));
  CHECK(result.ok);
}

TEST_CASE("validate_tensor reports the first non-binary cell") {
  const auto result = validate_tensor(single(Matrix::from_rows({{1, 0}, {0.5, 1}})));
  CHECK_FALSE(result.ok);
  CHECK(result.code == ErrorCode::NonBinaryValue);
  CHECK(result.individual == 0);
  CHECK(result.feature == 1);
  CHECK(result.time == 0);
  CHECK_THROWS_AS(require_valid(single(Matrix::from_rows({{0.5}}))), Error);
}

TEST_CASE("validate_tensor rejects ragged feature dimensions and empty tensors") {
  IrregularTensor x;
  x.matrices = {Matrix(3, 4), Matrix(4, 4)};
  x.feature_names = numbered("f", 3);
  x.individual_ids = {"a", "b"};
  CHECK(validate_tensor(x).code == ErrorCode::RaggedFeatureDim);
  CHECK(validate_tensor(IrregularTensor{}).code == ErrorCode::EmptyTensor);
}

TEST_CASE("reconstruct examples") {
  SUBCASE("zero pathway gives zero output") {
    Rng rng(1);
    const auto p = random_phenotypes(2, 3, 2, rng);
    const Matrix out = reconstruct(p, Matrix(2, 4));
    CHECK(out.rows() == 3);
    CHECK(out.cols() == 5);
    CHECK(out.sum() == 0.0);
  }
  SUBCASE("identity convolution") {
    PhenotypeTensor p(1, 2, 1);
    p[0] = Matrix::from_rows({{1}, {0}});
    CHECK(reconstruct(p, Matrix::from_rows({{1, 0, 1}})) ==
          Matrix::from_rows({{1, 0, 1}, {0, 0, 0}}));
  }
  SUBCASE("window of two") {
    PhenotypeTensor p(1, 2, 2);
    p[0] = Matrix::from_rows({{1, 0}, {0, 1}});
    CHECK(reconstruct(p, Matrix::from_rows({{1, 0, 1}})) ==
          Matrix::from_rows({{1, 0, 1, 0}, {0, 1, 0, 1}}));
  }
  SUBCASE("overlaps are not clamped") {
    PhenotypeTensor p(2, 1, 1, 1.0);
    const Matrix out = reconstruct(p, Matrix::from_rows({{1}, {1}}));
    CHECK(out(0, 0) == 2.0);
  }
  SUBCASE("rank mismatch") {
    PhenotypeTensor p(2, 1, 1, 1.0);
    CHECK_THROWS_AS(reconstruct(p, Matrix(3, 2)), Error);
  }
}

TEST_CASE("reconstruct_all matches a per-individual loop") {
  Rng rng(2);
  const auto x = random_tensor(3, 4, {5, 7, 6}, rng);
  const auto p = random_phenotypes(2, 4, 3, rng);
  const auto w = random_pathways(2, 3, x, rng);
  const auto all = reconstruct_all(p, w);
  REQUIRE(all.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(all[k] == reconstruct(p, w[k]));

  PathwayCollection zeros;
  zeros.matrices = {Matrix(2, 3), Matrix(2, 3)};
  for (const auto& m : reconstruct_all(p, zeros)) CHECK(m.sum() == 0.0);
}

TEST_CASE("reconstruction is linear in the pathway") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_phenotypes(3, 4, 2, rng);
    const Matrix w1 = random_matrix(3, 6, rng);
    const Matrix w2 = random_matrix(3, 6, rng);
    const double a = uniform(rng, 0.0, 3.0);
    const double b = uniform(rng, 0.0, 3.0);
    Matrix mix(3, 6);
    for (std::size_t j = 0; j < mix.size(); ++j) {
      mix.values()[j] = a * w1.values()[j] + b * w2.values()[j];
    }
    const Matrix lhs = reconstruct(p, mix);
    const Matrix r1 = reconstruct(p, w1);
    const Matrix r2 = reconstruct(p, w2);
    Matrix rhs(lhs.rows(), lhs.cols());
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      rhs.values()[j] = a * r1.values()[j] + b * r2.values()[j];
    }
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("reconstruction support lies within the window of an active pathway cell") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t window = 1 + uniform_index(rng, 3);
    const auto p = random_phenotypes(2, 3, window, rng);
    const Matrix w = random_binary(2, 6, rng, 0.2);
    const Matrix out = reconstruct(p, w);
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (std::size_t t = 0; t < out.cols(); ++t) {
        if (out(i, t) == 0.0) continue;
        bool covered = false;
        for (std::size_t tau = 0; tau < window && tau <= t; ++tau) {
          if (t - tau >= w.cols()) continue;
          for (std::size_t r = 0; r < 2; ++r) covered = covered || w(r, t - tau) != 0.0;
        }
        CHECK(covered);
      }
    }
  }
}

TEST_CASE("batched regular reconstruction equals the per-individual loop") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rank = 1 + uniform_index(rng, 4);
    const std::size_t features = 1 + uniform_index(rng, 6);
    const std::size_t window = 1 + uniform_index(rng, 4);
    const std::size_t cols = 1 + uniform_index(rng, 8);
    const std::size_t count = 1 + uniform_index(rng, 6);
    const auto p = random_phenotypes(rank, features, window, rng);
    std::vector<Matrix> w;
    for (std::size_t k = 0; k < count; ++k) w.push_back(random_matrix(rank, cols, rng));
    const RegularStack stack = reconstruct_batched_regular(p, w);
    REQUIRE(stack.count == count);
    for (std::size_t k = 0; k < count; ++k) {
      CHECK(max_abs_diff(stack.slice(k), reconstruct(p, w[k])) < 1e-6);
    }
  }
}

TEST_CASE("batched reconstruction rejects ragged pathways") {
  PhenotypeTensor p(1, 2, 2, 0.5);
  const std::vector<Matrix> w = {Matrix(1, 3), Matrix(1, 4)};
  try {
    reconstruct_batched_regular(p, w);
    FAIL("expected UnequalLengths");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnequalLengths);
  }
}

TEST_CASE("IrregularTensor subset keeps order and names") {
  Rng rng(6);
  const auto x = random_tensor(4, 2, {3, 4, 5, 6}, rng);
  const std::vector<std::size_t> pick = {2, 0};
  const auto s = x.subset(pick);
  REQUIRE(s.individuals() == 2);
  CHECK(s.matrices[0] == x.matrices[2]);
  CHECK(s.individual_ids[1] == "i0");
  CHECK(s.feature_names == x.feature_names);
  CHECK(x.min_duration() == 3);
}
