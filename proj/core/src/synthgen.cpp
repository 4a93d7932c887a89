#include "tempheno/synthgen.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace tempheno {

namespace {

constexpr std::uint64_t kPhenotypeStream = 0;

Matrix random_phenotype(std::size_t features, std::size_t window, double density, Rng& rng) {
  Matrix p(features, window);
  for (std::size_t tau = 0; tau < window; ++tau) {
    bool any = false;
    for (std::size_t i = 0; i < features; ++i) {
      if (uniform01(rng) < density) {
        p(i, tau) = 1.0;
        any = true;
      }
    }
    // Every slice carries at least one event.
    if (!any) p(uniform_index(rng, features), tau) = 1.0;
  }
  return p;
}

Matrix repeated_phenotype(std::size_t features, std::size_t window, std::size_t feature) {
  Matrix p(features, window);
  for (std::size_t tau = 0; tau < window; ++tau) p(feature, tau) = 1.0;
  return p;
}

Matrix planted_pathway(std::size_t rank, std::size_t starts, std::size_t window, double p,
                       Rng& rng) {
  Matrix w(rank, starts);
  for (std::size_t r = 0; r < rank; ++r) {
    std::optional<std::size_t> last;
    for (std::size_t t = 0; t < starts; ++t) {
      const double draw = uniform01(rng);
      if (last && t - *last < window) continue;
      if (draw < p) {
        w(r, t) = 1.0;
        last = t;
      }
    }
  }
  return w;
}

std::string padded(const char* prefix, std::size_t index, std::size_t total) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(total == 0 ? 0 : total - 1).size();
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

SyntheticDataset assemble(const GenConfig& cfg, PhenotypeTensor phenotypes) {
  SyntheticDataset out;
  out.phenotypes = std::move(phenotypes);
  for (std::size_t i = 0; i < cfg.features; ++i) {
    out.data.feature_names.push_back(padded("f", i, cfg.features));
  }
  out.phenotypes.feature_names = out.data.feature_names;
  out.data.matrices.reserve(cfg.individuals);
  out.pathways.matrices.reserve(cfg.individuals);
  for (std::size_t k = 0; k < cfg.individuals; ++k) {
    Rng rng(mix_seed(cfg.seed, k + 1));
    std::size_t duration = cfg.duration;
    if (cfg.duration_range) {
      const auto [lo, hi] = *cfg.duration_range;
      duration = lo + uniform_index(rng, hi - lo + 1);
    }
    Matrix w = planted_pathway(cfg.rank, pathway_length(duration, cfg.window), cfg.window,
                               cfg.occurrence_p, rng);
    out.data.matrices.push_back(binarize(reconstruct(out.phenotypes, w)));
    out.data.individual_ids.push_back(padded("i", k, cfg.individuals));
    out.pathways.matrices.push_back(std::move(w));
  }
  return out;
}

}  // namespace

void GenConfig::check() const {
  auto infeasible = [](const std::string& msg) { throw Error(ErrorCode::InfeasibleConfig, msg); };
  if (individuals == 0 || features == 0 || rank == 0 || window == 0) {
    infeasible("individuals, features, rank and window must be positive");
  }
  const std::size_t shortest = duration_range ? duration_range->first : duration;
  if (duration_range && duration_range->first > duration_range->second) {
    infeasible("duration range is empty");
  }
  if (window > shortest) {
    infeasible("window " + std::to_string(window) + " exceeds duration " +
               std::to_string(shortest));
  }
  if (!(occurrence_p >= 0.0 && occurrence_p < 1.0)) infeasible("occurrence_p must lie in [0,1)");
  if (!(feature_density >= 0.0 && feature_density <= 1.0)) {
    infeasible("feature_density must lie in [0,1]");
  }
  if (repeated > rank) infeasible("more repeated phenotypes than the rank");
}

Matrix binarize(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  const auto src = m.values();
  auto dst = out.values();
  for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] != 0.0 ? 1.0 : 0.0;
  return out;
}

SyntheticDataset generate(const GenConfig& cfg) {
  cfg.check();
  Rng rng(mix_seed(cfg.seed, kPhenotypeStream));
  PhenotypeTensor phenotypes;
  for (std::size_t r = 0; r < cfg.rank; ++r) {
    phenotypes.data.push_back(
        random_phenotype(cfg.features, cfg.window, cfg.feature_density, rng));
  }
  return assemble(cfg, std::move(phenotypes));
}

SyntheticDataset generate(GenConfig cfg, Rng& rng) {
  cfg.seed = rng();
  return generate(cfg);
}

SyntheticDataset generate_repeated_event_phenotypes(const GenConfig& cfg) {
  cfg.check();
  Rng rng(mix_seed(cfg.seed, kPhenotypeStream));
  const std::size_t random_count = cfg.rank - cfg.repeated;
  PhenotypeTensor phenotypes;
  for (std::size_t r = 0; r < random_count; ++r) {
    phenotypes.data.push_back(
        random_phenotype(cfg.features, cfg.window, cfg.feature_density, rng));
  }
  std::vector<std::size_t> pool(cfg.features);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  shuffle_in_place(pool, rng);
  for (std::size_t r = 0; r < cfg.repeated; ++r) {
    const std::size_t feature =
        r < pool.size() ? pool[r] : uniform_index(rng, cfg.features);
    phenotypes.data.push_back(repeated_phenotype(cfg.features, cfg.window, feature));
  }
  return assemble(cfg, std::move(phenotypes));
}

SyntheticDataset generate_repeated_event_phenotypes(GenConfig cfg, Rng& rng) {
  cfg.seed = rng();
  return generate_repeated_event_phenotypes(cfg);
}

void NoiseSpec::check() const {
  if (!(additive_lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (!(destructive_p >= 0.0 && destructive_p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "deletion probability must lie in [0,1)");
  }
}

NoisyData add_noise(const IrregularTensor& x, const NoiseSpec& spec, Rng& rng) {
  spec.check();
  NoisyData out;
  out.data = x;
  const std::size_t ones = x.count_ones();
  const std::uint64_t master = rng();
  for (std::size_t k = 0; k < out.data.individuals(); ++k) {
    Rng local(mix_seed(master, k));
    auto cells = out.data.matrices[k].values();
    if (spec.kind == NoiseKind::Additive) {
      if (spec.additive_lambda == 0.0) continue;
      std::poisson_distribution<std::size_t> count_dist(spec.additive_lambda);
      const std::size_t wanted = count_dist(local);
      std::vector<std::size_t> free;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == 0.0) free.push_back(c);
      }
      // Partial Fisher-Yates: distinct cells, equivalent to resampling collisions.
      const std::size_t added = std::min(wanted, free.size());
      for (std::size_t j = 0; j < added; ++j) {
        std::swap(free[j], free[j + uniform_index(local, free.size() - j)]);
        cells[free[j]] = 1.0;
      }
      out.flipped += added;
    } else {
      for (double& cell : cells) {
        if (cell == 1.0 && uniform01(local) < spec.destructive_p) {
          cell = 0.0;
          ++out.flipped;
        }
      }
    }
  }
  out.level = ones == 0 ? 0.0 : static_cast<double>(out.flipped) / static_cast<double>(ones);
  return out;
}

}  // namespace tempheno
