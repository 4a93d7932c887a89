#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tempheno/loss.hpp"
#include "tempheno/random.hpp"
#include "tempheno/tensor.hpp"

namespace tempheno::testing {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = 0.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = uniform(rng, lo, hi);
  return m;
}

inline Matrix random_binary(std::size_t rows, std::size_t cols, Rng& rng, double density = 0.5) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = uniform01(rng) < density ? 1.0 : 0.0;
  return m;
}

inline PhenotypeTensor random_phenotypes(std::size_t rank, std::size_t features, std::size_t window,
                                         Rng& rng, double lo = 0.0, double hi = 1.0) {
  PhenotypeTensor p(rank, features, window);
  for (auto& m : p.data) m = random_matrix(features, window, rng, lo, hi);
  return p;
}

inline std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline IrregularTensor random_tensor(std::size_t individuals, std::size_t features,
                                     const std::vector<std::size_t>& durations, Rng& rng,
                                     double density = 0.5) {
  IrregularTensor x;
  x.feature_names = numbered("f", features);
  x.individual_ids = numbered("i", individuals);
  for (std::size_t k = 0; k < individuals; ++k) {
    x.matrices.push_back(random_binary(features, durations[k % durations.size()], rng, density));
  }
  return x;
}

inline PathwayCollection random_pathways(std::size_t rank, std::size_t window,
                                         const IrregularTensor& x, Rng& rng, double lo = 0.0,
                                         double hi = 1.0) {
  PathwayCollection w;
  for (const auto& m : x.matrices) {
    w.matrices.push_back(random_matrix(rank, pathway_length(m.cols(), window), rng, lo, hi));
  }
  return w;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, std::abs(a.values()[j] - b.values()[j]));
  }
  return worst;
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

// True when some nonsuccession term of the row sits within `margin` of its kink.
inline bool near_kink(const Matrix& pathway, std::size_t window, double margin) {
  for (std::size_t r = 0; r < pathway.rows(); ++r) {
    for (std::size_t t = 0; t < pathway.cols(); ++t) {
      const std::size_t lo = t >= window ? t - window : 0;
      const std::size_t hi = std::min(pathway.cols() - 1, t + window);
      double s = 0.0;
      for (std::size_t u = lo; u <= hi; ++u) s += pathway(r, u);
      if (std::abs(pathway(r, t) * std::log(std::max(s, 1e-8))) < margin) return true;
    }
  }
  return false;
}

// Central differences of total_loss against gradients(Both); entries whose
// perturbation crosses a kink of the nonsuccession term are skipped.
inline GradientCheck check_gradients(PhenotypeTensor p, PathwayCollection w,
                                     const IrregularTensor& x, const HyperParams& hp,
                                     double h = 1e-5) {
  const Gradients g = gradients(p, w, x, hp, GradTarget::Both);
  GradientCheck out;
  auto compare = [&](double analytic, double& cell, const Matrix* pathway) {
    const double saved = cell;
    if (saved <= h || saved >= 1.0 - h) {
      ++out.skipped;
      return;
    }
    if (pathway != nullptr && hp.nonsuccession_weight != 0.0 &&
        near_kink(*pathway, p.window(), 1e-3)) {
      ++out.skipped;
      return;
    }
    cell = saved + h;
    const double up = total_loss(p, w, x, hp).total;
    cell = saved - h;
    const double down = total_loss(p, w, x, hp).total;
    cell = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double diff = std::abs(numeric - analytic);
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    const double err = diff <= 1e-8 ? 0.0 : diff / scale;
    out.max_relative_error = std::max(out.max_relative_error, err);
    ++out.checked;
  };
  for (std::size_t r = 0; r < p.rank(); ++r) {
    for (std::size_t j = 0; j < p[r].size(); ++j) {
      compare(g.grad_phenotypes[r].values()[j], p[r].values()[j], nullptr);
    }
  }
  for (std::size_t k = 0; k < w.individuals(); ++k) {
    for (std::size_t j = 0; j < w[k].size(); ++j) {
      compare(g.grad_pathways[k].values()[j], w[k].values()[j], &w[k]);
    }
  }
  return out;
}

}  // namespace tempheno::testing
