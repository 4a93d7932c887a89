#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tempheno/tensor.hpp"

namespace tempheno {

struct FrobeniusPair {
  double error = 0.0;  // ||X - Xhat||_F
  double norm = 0.0;   // ||X||_F
};

struct FitReport {
  double fit_x = 0.0;
  std::optional<double> fit_p;
  std::optional<double> fit_w;
  std::optional<std::vector<std::size_t>> matching;
  std::vector<FrobeniusPair> per_individual_frobenius;
};

/// 1 - sum_k ||X_k - Xhat_k||_F / sum_k ||X_k||_F.
double fit(std::span<const Matrix> truth, std::span<const Matrix> approx);

/// fit() plus the per-individual error/norm pairs.
FitReport fit_report(std::span<const Matrix> truth, std::span<const Matrix> approx);

/// Mean over window slices of the column cosine. Two zero columns count as 1,
/// a single zero column as 0.
double phenotype_cosine(const Matrix& a, const Matrix& b);

/// Perfect matching on a square cost matrix; pairs are (row, col) sorted by row.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;

  /// assignment()[row] = matched column.
  std::vector<std::size_t> assignment() const;
};

/// Minimum-cost assignment (Hungarian method with potentials, O(R^3)).
Matching hungarian(const Matrix& cost);

struct PhenotypeMatch {
  Matching matching;  // (index in a, index in b)
  double similarity = 0.0;
};

/// Optimal matching maximizing total phenotype cosine; similarity is the mean
/// matched cosine, so a set compared with itself scores 1.
PhenotypeMatch match_phenotypes(const PhenotypeTensor& a, const PhenotypeTensor& b);

/// Mean of (1 - cosine) over the R(R-1)/2 unordered phenotype pairs.
double diversity(const PhenotypeTensor& set);

/// Learned phenotypes reordered so that slot i holds the match of truth[i].
PhenotypeTensor align_phenotypes(const PhenotypeTensor& learned,
                                 std::span<const std::size_t> assignment);

/// Pathway rows reordered with the same assignment.
PathwayCollection align_pathways(const PathwayCollection& learned,
                                 std::span<const std::size_t> assignment);

struct AlignedFit {
  double fit = 0.0;
  std::vector<std::size_t> assignment;  // truth index -> learned index
};

/// FIT of the learned phenotypes after Hungarian alignment to the truth.
AlignedFit fit_p(const PhenotypeTensor& truth, const PhenotypeTensor& learned);

/// FIT of the learned pathways, rows aligned through the phenotype matching.
double fit_w(const PhenotypeTensor& truth_phenotypes, const PathwayCollection& truth_pathways,
             const PhenotypeTensor& learned_phenotypes,
             const PathwayCollection& learned_pathways);

}  // namespace tempheno
