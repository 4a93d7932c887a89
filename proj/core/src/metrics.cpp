#include "tempheno/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tempheno {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

void check_same_rank(const PhenotypeTensor& a, const PhenotypeTensor& b) {
  if (a.rank() != b.rank()) {
    throw Error(ErrorCode::RankMismatch,
                "rank " + std::to_string(a.rank()) + " vs " + std::to_string(b.rank()));
  }
}

}  // namespace

FitReport fit_report(std::span<const Matrix> truth, std::span<const Matrix> approx) {
  if (truth.size() != approx.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(truth.size()) + " matrices vs " +
                                              std::to_string(approx.size()));
  }
  FitReport report;
  report.per_individual_frobenius.reserve(truth.size());
  double error_sum = 0.0;
  double norm_sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    check_same_shape(truth[k], approx[k]);
    const auto xv = truth[k].values();
    const auto xh = approx[k].values();
    double err2 = 0.0;
    double norm2 = 0.0;
    for (std::size_t c = 0; c < xv.size(); ++c) {
      const double d = xv[c] - xh[c];
      err2 += d * d;
      norm2 += xv[c] * xv[c];
    }
    const FrobeniusPair pair{std::sqrt(err2), std::sqrt(norm2)};
    error_sum += pair.error;
    norm_sum += pair.norm;
    report.per_individual_frobenius.push_back(pair);
  }
  if (!(norm_sum > 0.0)) {
    throw Error(ErrorCode::ZeroNormGroundTruth, "ground truth has zero Frobenius norm");
  }
  report.fit_x = 1.0 - error_sum / norm_sum;
  return report;
}

double fit(std::span<const Matrix> truth, std::span<const Matrix> approx) {
  return fit_report(truth, approx).fit_x;
}

double phenotype_cosine(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  if (a.cols() == 0) return 1.0;
  double total = 0.0;
  for (std::size_t tau = 0; tau < a.cols(); ++tau) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      dot += a(i, tau) * b(i, tau);
      na += a(i, tau) * a(i, tau);
      nb += b(i, tau) * b(i, tau);
    }
    if (na == 0.0 && nb == 0.0) {
      total += 1.0;
    } else if (na == 0.0 || nb == 0.0) {
      continue;
    } else {
      total += std::min(1.0, dot / std::sqrt(na * nb));
    }
  }
  return total / static_cast<double>(a.cols());
}

std::vector<std::size_t> Matching::assignment() const {
  std::vector<std::size_t> out(pairs.size());
  for (const auto& [row, col] : pairs) out[row] = col;
  return out;
}

Matching hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "assignment needs a square cost matrix");
  }
  const std::size_t n = cost.rows();
  Matching result;
  if (n == 0) return result;

  // 1-based potentials formulation; column 0 is a virtual sentinel.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> row_of(n + 1, 0);  // row_of[col] = matched row
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = row_of[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(row0 - 1, j - 1) - u[row0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      row_of[col0] = row_of[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.pairs.resize(n);
  for (std::size_t j = 1; j <= n; ++j) result.pairs[row_of[j] - 1] = {row_of[j] - 1, j - 1};
  for (const auto& [row, col] : result.pairs) result.cost += cost(row, col);
  return result;
}

PhenotypeMatch match_phenotypes(const PhenotypeTensor& a, const PhenotypeTensor& b) {
  check_same_rank(a, b);
  const std::size_t rank = a.rank();
  Matrix cosines(rank, rank);
  Matrix cost(rank, rank);
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = 0; j < rank; ++j) {
      cosines(i, j) = phenotype_cosine(a[i], b[j]);
      cost(i, j) = 1.0 - cosines(i, j);
    }
  }
  PhenotypeMatch out;
  out.matching = hungarian(cost);
  if (rank == 0) return out;
  double total = 0.0;
  for (const auto& [i, j] : out.matching.pairs) total += cosines(i, j);
  out.similarity = total / static_cast<double>(rank);
  return out;
}

double diversity(const PhenotypeTensor& set) {
  const std::size_t rank = set.rank();
  if (rank < 2) {
    throw Error(ErrorCode::RankTooSmall, "diversity needs at least 2 phenotypes");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = i + 1; j < rank; ++j) total += 1.0 - phenotype_cosine(set[i], set[j]);
  }
  return total / (static_cast<double>(rank * (rank - 1)) / 2.0);
}

PhenotypeTensor align_phenotypes(const PhenotypeTensor& learned,
                                 std::span<const std::size_t> assignment) {
  PhenotypeTensor out;
  out.feature_names = learned.feature_names;
  out.data.reserve(assignment.size());
  for (std::size_t j : assignment) out.data.push_back(learned.data.at(j));
  return out;
}

PathwayCollection align_pathways(const PathwayCollection& learned,
                                 std::span<const std::size_t> assignment) {
  PathwayCollection out;
  out.matrices.reserve(learned.individuals());
  for (const Matrix& w : learned.matrices) {
    Matrix aligned(assignment.size(), w.cols());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      const auto src = w.row(assignment[i]);
      std::copy(src.begin(), src.end(), aligned.row(i).begin());
    }
    out.matrices.push_back(std::move(aligned));
  }
  return out;
}

AlignedFit fit_p(const PhenotypeTensor& truth, const PhenotypeTensor& learned) {
  const PhenotypeMatch match = match_phenotypes(truth, learned);
  AlignedFit out;
  out.assignment = match.matching.assignment();
  const PhenotypeTensor aligned = align_phenotypes(learned, out.assignment);
  out.fit = fit(truth.data, aligned.data);
  return out;
}

double fit_w(const PhenotypeTensor& truth_phenotypes, const PathwayCollection& truth_pathways,
             const PhenotypeTensor& learned_phenotypes,
             const PathwayCollection& learned_pathways) {
  if (truth_pathways.rank() != learned_pathways.rank()) {
    throw Error(ErrorCode::RankMismatch, "pathway ranks differ");
  }
  const PhenotypeMatch match = match_phenotypes(truth_phenotypes, learned_phenotypes);
  const PathwayCollection aligned =
      align_pathways(learned_pathways, match.matching.assignment());
  return fit(truth_pathways.matrices, aligned.matrices);
}

}  // namespace tempheno
