#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tempheno/tensor.hpp"

namespace tempheno {

/// Composite objective: reconstruction + alpha * sparsity + beta * nonsuccession.
/// The three component fields hold the unweighted terms.
struct LossBreakdown {
  double reconstruction = 0.0;
  double sparsity = 0.0;
  double nonsuccession = 0.0;
  double total = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Bernoulli loss summed over every cell:
///   log(xhat + 1) - x * log(max(xhat, eps)).
double bernoulli_loss(std::span<const Matrix> reconstructions, const IrregularTensor& x,
                      double log_epsilon);

/// Same loss for a single individual.
double bernoulli_loss(const Matrix& reconstruction, const Matrix& x, double log_epsilon);

/// L1 norm of the phenotype tensor.
double sparsity_term(const PhenotypeTensor& phenotypes);

/// Penalty on restarting a phenotype inside its own window:
///   sum_r sum_t max(0, w(r,t) * log(max(sum_{|u-t|<=window} w(r,u), eps)))
/// where the window sum is truncated to valid columns.
double nonsuccession_term(const Matrix& pathway, std::size_t window, double log_epsilon = 1e-8);

/// Evaluates the objective over all individuals, or only over `subset` when
/// given (the sparsity term is always counted once).
LossBreakdown total_loss(const PhenotypeTensor& phenotypes, const PathwayCollection& pathways,
                         const IrregularTensor& x, const HyperParams& hp,
                         std::optional<std::span<const std::size_t>> subset = std::nullopt);

enum class GradTarget { Phenotypes, Pathways, Both };

/// grad_pathways[j] is the gradient for individual `individuals[j]`.
struct Gradients {
  PhenotypeTensor grad_phenotypes;
  std::vector<Matrix> grad_pathways;
  std::vector<std::size_t> individuals;
};

Gradients gradients(const PhenotypeTensor& phenotypes, const PathwayCollection& pathways,
                    const IrregularTensor& x, const HyperParams& hp, GradTarget target,
                    std::optional<std::span<const std::size_t>> subset = std::nullopt);

// Per-individual building blocks, shared by training and projection.

/// Elementwise d(loss)/d(xhat): 1/(xhat+1) - x/xhat, with the log clamp flat below eps.
Matrix bernoulli_derivative(const Matrix& reconstruction, const Matrix& x, double log_epsilon);

/// grad_p_r(i,tau) += sum_s dloss(i, s+tau) * w(r, s).
void accumulate_phenotype_gradient(const Matrix& dloss, const Matrix& pathway,
                                   PhenotypeTensor& grad);

/// grad_w(r,s) = sum_i sum_tau dloss(i, s+tau) * p_r(i, tau).
Matrix pathway_gradient(const Matrix& dloss, const PhenotypeTensor& phenotypes);

/// grad += scale * d(nonsuccession_term)/d(pathway).
void add_nonsuccession_gradient(const Matrix& pathway, std::size_t window, double log_epsilon,
                                double scale, Matrix& grad);

}  // namespace tempheno
