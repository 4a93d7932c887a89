#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tempheno/error.hpp"

namespace tempheno {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, value) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Builds a matrix from nested rows; every row must have the same length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  void fill(double value);
  void clip(double lo, double hi);
  double sum() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Collection of K binary feature-by-time matrices sharing the feature dimension.
struct IrregularTensor {
  std::vector<Matrix> matrices;
  std::vector<std::string> feature_names;
  std::vector<std::string> individual_ids;

  std::size_t individuals() const noexcept { return matrices.size(); }
  std::size_t features() const noexcept { return matrices.empty() ? 0 : matrices.front().rows(); }
  std::size_t duration(std::size_t k) const noexcept { return matrices[k].cols(); }
  std::size_t min_duration() const noexcept;
  std::size_t count_ones() const noexcept;

  /// Sub-tensor holding the given individuals, in the given order.
  IrregularTensor subset(std::span<const std::size_t> indices) const;
};

/// R temporal phenotypes, each an n x window matrix with entries in [0,1].
struct PhenotypeTensor {
  std::vector<Matrix> data;
  std::vector<std::string> feature_names;

  PhenotypeTensor() = default;
  PhenotypeTensor(std::size_t rank, std::size_t features, std::size_t window, double value = 0.0);

  std::size_t rank() const noexcept { return data.size(); }
  std::size_t features() const noexcept { return data.empty() ? 0 : data.front().rows(); }
  std::size_t window() const noexcept { return data.empty() ? 0 : data.front().cols(); }

  Matrix& operator[](std::size_t r) noexcept { return data[r]; }
  const Matrix& operator[](std::size_t r) const noexcept { return data[r]; }
};

/// One R x T' assignment matrix per individual (T' = T - window + 1).
struct PathwayCollection {
  std::vector<Matrix> matrices;

  std::size_t individuals() const noexcept { return matrices.size(); }
  std::size_t rank() const noexcept { return matrices.empty() ? 0 : matrices.front().rows(); }

  Matrix& operator[](std::size_t k) noexcept { return matrices[k]; }
  const Matrix& operator[](std::size_t k) const noexcept { return matrices[k]; }
};

struct HyperParams {
  std::size_t rank = 4;
  std::size_t window = 3;
  double sparsity_weight = 1.0;      // alpha
  double nonsuccession_weight = 0.5; // beta
  double learning_rate = 1e-3;
  std::size_t batch_size = 50;
  std::size_t epochs = 200;
  std::uint64_t rng_seed = 0;
  double log_epsilon = 1e-8;

  /// Throws InvalidArgument when a field is out of its domain.
  void check() const;
};

struct ValidationResult {
  bool ok = true;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::size_t individual = 0;
  std::size_t feature = 0;
  std::size_t time = 0;
  std::string message;

  explicit operator bool() const noexcept { return ok; }
};

/// Checks the IrregularTensor invariants and reports the first violation.
ValidationResult validate_tensor(const IrregularTensor& x);

/// Throws the error described by validate_tensor when the tensor is invalid.
void require_valid(const IrregularTensor& x);

/// Number of pathway columns for a sequence of the given duration.
inline std::size_t pathway_length(std::size_t duration, std::size_t window) noexcept {
  return duration + 1 - window;
}

/// Convolutional reconstruction of one individual:
///   xhat(i, t) = sum_r sum_{tau=0}^{min(window-1, t)} w(r, t - tau) * p_r(i, tau)
/// over the full duration T = T' + window - 1. No clamping is applied.
Matrix reconstruct(const PhenotypeTensor& phenotypes, const Matrix& pathway);

std::vector<Matrix> reconstruct_all(const PhenotypeTensor& phenotypes,
                                    const PathwayCollection& pathways);

/// K x n x T block of equal-length reconstructions, stored contiguously.
struct RegularStack {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t k, std::size_t i, std::size_t t) const noexcept {
    return values[(k * rows + i) * cols + t];
  }
  Matrix slice(std::size_t k) const;
};

/// Vectorized reconstruction for pathways that all share T'. Evaluated as one
/// dense product per phenotype offset over the concatenated pathways.
RegularStack reconstruct_batched_regular(const PhenotypeTensor& phenotypes,
                                         std::span<const Matrix> pathways);

}  // namespace tempheno
