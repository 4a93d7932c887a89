#include "tempheno/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tempheno/parallel.hpp"

namespace tempheno {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, std::size_t k) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "individual " + std::to_string(k) + ": reconstruction is " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", data is " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

std::vector<std::size_t> resolve_subset(std::optional<std::span<const std::size_t>> subset,
                                        std::size_t count) {
  if (subset) {
    for (std::size_t k : *subset) {
      if (k >= count) throw Error(ErrorCode::ShapeMismatch, "batch index out of range");
    }
    return {subset->begin(), subset->end()};
  }
  std::vector<std::size_t> all(count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

void check_model_shapes(const PhenotypeTensor& phenotypes, const PathwayCollection& pathways,
                        const IrregularTensor& x) {
  if (pathways.individuals() != x.individuals()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(pathways.individuals()) +
                                              " pathways for " +
                                              std::to_string(x.individuals()) + " individuals");
  }
  if (phenotypes.features() != x.features()) {
    throw Error(ErrorCode::ShapeMismatch, "phenotypes have " +
                                              std::to_string(phenotypes.features()) +
                                              " features, data has " +
                                              std::to_string(x.features()));
  }
}

// Window sums of one pathway row, truncated to [0, T').
void window_sums(std::span<const double> row, std::size_t window, std::vector<double>& sums) {
  const std::size_t len = row.size();
  sums.resize(len);
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t lo = t >= window ? t - window : 0;
    const std::size_t hi = std::min(len - 1, t + window);
    double s = 0.0;
    for (std::size_t u = lo; u <= hi; ++u) s += row[u];
    sums[t] = s;
  }
}

}  // namespace

double bernoulli_loss(const Matrix& reconstruction, const Matrix& x, double log_epsilon) {
  check_same_shape(reconstruction, x, 0);
  const auto xh = reconstruction.values();
  const auto xv = x.values();
  double total = 0.0;
  for (std::size_t c = 0; c < xh.size(); ++c) {
    total += std::log1p(xh[c]);
    if (xv[c] != 0.0) total -= xv[c] * std::log(std::max(xh[c], log_epsilon));
  }
  return total;
}

double bernoulli_loss(std::span<const Matrix> reconstructions, const IrregularTensor& x,
                      double log_epsilon) {
  if (reconstructions.size() != x.individuals()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(reconstructions.size()) +
                                              " reconstructions for " +
                                              std::to_string(x.individuals()) + " individuals");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < reconstructions.size(); ++k) {
    check_same_shape(reconstructions[k], x.matrices[k], k);
    total += bernoulli_loss(reconstructions[k], x.matrices[k], log_epsilon);
  }
  return total;
}

double sparsity_term(const PhenotypeTensor& phenotypes) {
  double total = 0.0;
  for (const Matrix& p : phenotypes.data) {
    for (double v : p.values()) total += std::abs(v);
  }
  return total;
}

double nonsuccession_term(const Matrix& pathway, std::size_t window, double log_epsilon) {
  double total = 0.0;
  std::vector<double> sums;
  for (std::size_t r = 0; r < pathway.rows(); ++r) {
    const auto row = pathway.row(r);
    window_sums(row, window, sums);
    for (std::size_t t = 0; t < row.size(); ++t) {
      const double term = row[t] * std::log(std::max(sums[t], log_epsilon));
      if (term > 0.0) total += term;
    }
  }
  return total;
}

LossBreakdown total_loss(const PhenotypeTensor& phenotypes, const PathwayCollection& pathways,
                         const IrregularTensor& x, const HyperParams& hp,
                         std::optional<std::span<const std::size_t>> subset) {
  check_model_shapes(phenotypes, pathways, x);
  const auto members = resolve_subset(subset, x.individuals());
  std::vector<double> recon(members.size());
  std::vector<double> succ(members.size());
  parallel_for(members.size(), [&](std::size_t j) {
    const std::size_t k = members[j];
    const Matrix xhat = reconstruct(phenotypes, pathways[k]);
    check_same_shape(xhat, x.matrices[k], k);
    recon[j] = bernoulli_loss(xhat, x.matrices[k], hp.log_epsilon);
    succ[j] = nonsuccession_term(pathways[k], phenotypes.window(), hp.log_epsilon);
  });
  LossBreakdown out;
  out.alpha = hp.sparsity_weight;
  out.beta = hp.nonsuccession_weight;
  out.reconstruction = std::accumulate(recon.begin(), recon.end(), 0.0);
  out.nonsuccession = std::accumulate(succ.begin(), succ.end(), 0.0);
  out.sparsity = sparsity_term(phenotypes);
  out.total = out.reconstruction + out.alpha * out.sparsity + out.beta * out.nonsuccession;
  return out;
}

Matrix bernoulli_derivative(const Matrix& reconstruction, const Matrix& x, double log_epsilon) {
  Matrix out(reconstruction.rows(), reconstruction.cols());
  const auto xh = reconstruction.values();
  const auto xv = x.values();
  auto dst = out.values();
  for (std::size_t c = 0; c < xh.size(); ++c) {
    double d = 1.0 / (xh[c] + 1.0);
    if (xv[c] != 0.0 && xh[c] >= log_epsilon) d -= xv[c] / xh[c];
    dst[c] = d;
  }
  return out;
}

void accumulate_phenotype_gradient(const Matrix& dloss, const Matrix& pathway,
                                   PhenotypeTensor& grad) {
  const std::size_t starts = pathway.cols();
  for (std::size_t r = 0; r < grad.rank(); ++r) {
    const double* w = pathway.row(r).data();
    Matrix& g = grad[r];
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const double* d = dloss.row(i).data();
      for (std::size_t tau = 0; tau < g.cols(); ++tau) {
        const double* shifted = d + tau;
        double acc = 0.0;
        for (std::size_t s = 0; s < starts; ++s) acc += shifted[s] * w[s];
        g(i, tau) += acc;
      }
    }
  }
}

Matrix pathway_gradient(const Matrix& dloss, const PhenotypeTensor& phenotypes) {
  const std::size_t starts = dloss.cols() + 1 - phenotypes.window();
  Matrix out(phenotypes.rank(), starts);
  for (std::size_t r = 0; r < phenotypes.rank(); ++r) {
    const Matrix& p = phenotypes[r];
    double* g = out.row(r).data();
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const double* d = dloss.row(i).data();
      for (std::size_t tau = 0; tau < p.cols(); ++tau) {
        const double coef = p(i, tau);
        if (coef == 0.0) continue;
        const double* shifted = d + tau;
        for (std::size_t s = 0; s < starts; ++s) g[s] += coef * shifted[s];
      }
    }
  }
  return out;
}

void add_nonsuccession_gradient(const Matrix& pathway, std::size_t window, double log_epsilon,
                                double scale, Matrix& grad) {
  if (scale == 0.0) return;
  std::vector<double> sums;
  std::vector<double> coef;
  for (std::size_t r = 0; r < pathway.rows(); ++r) {
    const auto row = pathway.row(r);
    const std::size_t len = row.size();
    window_sums(row, window, sums);
    coef.assign(len, 0.0);
    auto g = grad.row(r);
    for (std::size_t t = 0; t < len; ++t) {
      const double clamped = std::max(sums[t], log_epsilon);
      const double term = row[t] * std::log(clamped);
      if (term <= 0.0) continue;
      // d/dw_t of w_t * log(s_t): log(s_t) from the weight, w_t/s_t through
      // every w_u inside the window of t (including u = t).
      g[t] += scale * std::log(clamped);
      if (sums[t] >= log_epsilon) coef[t] = row[t] / sums[t];
    }
    // Windows are symmetric, so u lies in window(t) iff t lies in window(u).
    std::vector<double> as_row(coef.begin(), coef.end());
    window_sums(as_row, window, sums);
    for (std::size_t u = 0; u < len; ++u) g[u] += scale * sums[u];
  }
}

Gradients gradients(const PhenotypeTensor& phenotypes, const PathwayCollection& pathways,
                    const IrregularTensor& x, const HyperParams& hp, GradTarget target,
                    std::optional<std::span<const std::size_t>> subset) {
  check_model_shapes(phenotypes, pathways, x);
  const auto members = resolve_subset(subset, x.individuals());
  const bool want_p = target != GradTarget::Pathways;
  const bool want_w = target != GradTarget::Phenotypes;

  Gradients out;
  out.individuals = members;
  out.grad_phenotypes =
      PhenotypeTensor(phenotypes.rank(), phenotypes.features(), phenotypes.window());
  out.grad_phenotypes.feature_names = phenotypes.feature_names;
  if (want_w) out.grad_pathways.resize(members.size());

  std::vector<PhenotypeTensor> partial_p(want_p ? members.size() : 0);
  parallel_for(members.size(), [&](std::size_t j) {
    const std::size_t k = members[j];
    const Matrix xhat = reconstruct(phenotypes, pathways[k]);
    check_same_shape(xhat, x.matrices[k], k);
    const Matrix dloss = bernoulli_derivative(xhat, x.matrices[k], hp.log_epsilon);
    if (want_p) {
      partial_p[j] = PhenotypeTensor(phenotypes.rank(), phenotypes.features(), phenotypes.window());
      accumulate_phenotype_gradient(dloss, pathways[k], partial_p[j]);
    }
    if (want_w) {
      Matrix g = pathway_gradient(dloss, phenotypes);
      add_nonsuccession_gradient(pathways[k], phenotypes.window(), hp.log_epsilon,
                                 hp.nonsuccession_weight, g);
      out.grad_pathways[j] = std::move(g);
    }
  });

  if (want_p) {
    // Fixed reduction order.
    for (const auto& part : partial_p) {
      for (std::size_t r = 0; r < part.rank(); ++r) {
        auto dst = out.grad_phenotypes[r].values();
        const auto src = part[r].values();
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
      }
    }
    for (auto& g : out.grad_phenotypes.data) {
      for (double& v : g.values()) v += hp.sparsity_weight;
    }
  }
  return out;
}

}  // namespace tempheno
