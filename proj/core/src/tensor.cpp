#include "tempheno/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tempheno {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "matrix storage does not match " +
                                              std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw Error(ErrorCode::ShapeMismatch, "ragged row " + std::to_string(i));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

void Matrix::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void Matrix::clip(double lo, double hi) {
  for (double& v : values_) v = std::min(std::max(v, lo), hi);
}

double Matrix::sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::size_t IrregularTensor::min_duration() const noexcept {
  std::size_t shortest = 0;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    shortest = k == 0 ? matrices[k].cols() : std::min(shortest, matrices[k].cols());
  }
  return shortest;
}

std::size_t IrregularTensor::count_ones() const noexcept {
  std::size_t total = 0;
  for (const auto& m : matrices) {
    total += static_cast<std::size_t>(std::count(m.values().begin(), m.values().end(), 1.0));
  }
  return total;
}

IrregularTensor IrregularTensor::subset(std::span<const std::size_t> indices) const {
  IrregularTensor out;
  out.feature_names = feature_names;
  out.matrices.reserve(indices.size());
  for (std::size_t k : indices) {
    out.matrices.push_back(matrices.at(k));
    if (k < individual_ids.size()) out.individual_ids.push_back(individual_ids[k]);
  }
  return out;
}

PhenotypeTensor::PhenotypeTensor(std::size_t rank, std::size_t features, std::size_t window,
                                 double value)
    : data(rank, Matrix(features, window, value)) {}

void HyperParams::check() const {
  if (rank == 0) throw Error(ErrorCode::InvalidArgument, "rank must be positive");
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  if (!(sparsity_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  if (!(nonsuccession_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (!(log_epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "log epsilon must be > 0");
}

ValidationResult validate_tensor(const IrregularTensor& x) {
  ValidationResult result;
  auto fail = [&](ErrorCode code, std::size_t k, std::size_t i, std::size_t t, std::string msg) {
    result = ValidationResult{false, code, k, i, t, std::move(msg)};
    return result;
  };
  if (x.matrices.empty()) return fail(ErrorCode::EmptyTensor, 0, 0, 0, "tensor has no individuals");
  const std::size_t n = x.matrices.front().rows();
  if (n == 0) return fail(ErrorCode::EmptyTensor, 0, 0, 0, "tensor has no features");
  for (std::size_t k = 0; k < x.matrices.size(); ++k) {
    const Matrix& m = x.matrices[k];
    if (m.rows() != n) {
      return fail(ErrorCode::RaggedFeatureDim, k, 0, 0,
                  "individual " + std::to_string(k) + " has " + std::to_string(m.rows()) +
                      " features, expected " + std::to_string(n));
    }
    if (m.cols() == 0) {
      return fail(ErrorCode::EmptyTensor, k, 0, 0,
                  "individual " + std::to_string(k) + " has zero duration");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t t = 0; t < m.cols(); ++t) {
        const double v = m(i, t);
        if (v != 0.0 && v != 1.0) {
          return fail(ErrorCode::NonBinaryValue, k, i, t,
                      "value " + std::to_string(v) + " at (" + std::to_string(k) + "," +
                          std::to_string(i) + "," + std::to_string(t) + ")");
        }
      }
    }
  }
  if (!x.feature_names.empty() && x.feature_names.size() != n) {
    return fail(ErrorCode::RaggedFeatureDim, 0, 0, 0,
                std::to_string(x.feature_names.size()) + " feature names for " +
                    std::to_string(n) + " rows");
  }
  return result;
}

void require_valid(const IrregularTensor& x) {
  if (auto r = validate_tensor(x); !r) throw Error(r.code, r.message);
}

namespace {

void check_rank(const PhenotypeTensor& phenotypes, const Matrix& pathway) {
  if (phenotypes.rank() != pathway.rows()) {
    throw Error(ErrorCode::RankMismatch, "phenotypes have rank " +
                                             std::to_string(phenotypes.rank()) +
                                             ", pathway has " + std::to_string(pathway.rows()));
  }
}

}  // namespace

Matrix reconstruct(const PhenotypeTensor& phenotypes, const Matrix& pathway) {
  check_rank(phenotypes, pathway);
  const std::size_t n = phenotypes.features();
  const std::size_t window = phenotypes.window();
  const std::size_t starts = pathway.cols();
  Matrix out(n, starts == 0 ? 0 : starts + window - 1);
  for (std::size_t r = 0; r < phenotypes.rank(); ++r) {
    const Matrix& p = phenotypes[r];
    const auto w = pathway.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = out.row(i).data();
      for (std::size_t tau = 0; tau < window; ++tau) {
        const double coef = p(i, tau);
        if (coef == 0.0) continue;
        double* shifted = dst + tau;
        for (std::size_t s = 0; s < starts; ++s) shifted[s] += coef * w[s];
      }
    }
  }
  return out;
}

std::vector<Matrix> reconstruct_all(const PhenotypeTensor& phenotypes,
                                    const PathwayCollection& pathways) {
  std::vector<Matrix> out;
  out.reserve(pathways.individuals());
  for (const Matrix& w : pathways.matrices) out.push_back(reconstruct(phenotypes, w));
  return out;
}

Matrix RegularStack::slice(std::size_t k) const {
  std::vector<double> block(values.begin() + static_cast<std::ptrdiff_t>(k * rows * cols),
                            values.begin() + static_cast<std::ptrdiff_t>((k + 1) * rows * cols));
  return Matrix(rows, cols, std::move(block));
}

RegularStack reconstruct_batched_regular(const PhenotypeTensor& phenotypes,
                                         std::span<const Matrix> pathways) {
  RegularStack out;
  if (pathways.empty()) return out;
  const std::size_t rank = phenotypes.rank();
  const std::size_t n = phenotypes.features();
  const std::size_t window = phenotypes.window();
  const std::size_t starts = pathways.front().cols();
  for (const Matrix& w : pathways) {
    check_rank(phenotypes, w);
    if (w.cols() != starts) {
      throw Error(ErrorCode::UnequalLengths, "batched reconstruction needs equal pathway lengths (" +
                                                 std::to_string(starts) + " vs " +
                                                 std::to_string(w.cols()) + ")");
    }
  }
  const std::size_t count = pathways.size();
  const std::size_t span_cols = count * starts;

  // Concatenate all pathways into one R x (K*T') operand.
  std::vector<double> stacked(rank * span_cols);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t r = 0; r < rank; ++r) {
      const auto src = pathways[k].row(r);
      std::copy(src.begin(), src.end(), stacked.begin() + static_cast<std::ptrdiff_t>(r * span_cols + k * starts));
    }
  }

  out.count = count;
  out.rows = n;
  out.cols = starts + window - 1;
  out.values.assign(count * n * out.cols, 0.0);

  // For each offset tau: Y = P_tau (n x R) * stacked (R x K*T'), scattered to t = s + tau.
  std::vector<double> product(n * span_cols);
  for (std::size_t tau = 0; tau < window; ++tau) {
    std::fill(product.begin(), product.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = product.data() + i * span_cols;
      for (std::size_t r = 0; r < rank; ++r) {
        const double coef = phenotypes[r](i, tau);
        if (coef == 0.0) continue;
        const double* src = stacked.data() + r * span_cols;
        for (std::size_t c = 0; c < span_cols; ++c) dst[c] += coef * src[c];
      }
    }
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double* src = product.data() + i * span_cols + k * starts;
        double* dst = out.values.data() + (k * n + i) * out.cols + tau;
        for (std::size_t s = 0; s < starts; ++s) dst[s] += src[s];
      }
    }
  }
  return out;
}

}  // namespace tempheno
