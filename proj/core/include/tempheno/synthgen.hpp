#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "tempheno/random.hpp"
#include "tempheno/tensor.hpp"

namespace tempheno {

struct GenConfig {
  std::size_t individuals = 500;
  std::size_t features = 20;
  std::size_t rank = 4;
  std::size_t window = 3;
  std::size_t duration = 10;
  double occurrence_p = 0.3;
  double feature_density = 0.3;
  std::uint64_t seed = 0;
  /// Inclusive per-individual duration range; overrides `duration` when set.
  std::optional<std::pair<std::size_t, std::size_t>> duration_range;
  /// Number of phenotypes (taken from the end of the set) built as one
  /// feature repeated at every offset. Used by the repeated-event generator.
  std::size_t repeated = 0;

  /// Throws InfeasibleConfig when the configuration cannot be generated.
  void check() const;
};

struct SyntheticDataset {
  IrregularTensor data;
  PhenotypeTensor phenotypes;
  PathwayCollection pathways;
};

/// Planted binary phenotypes, pathways with at least `window` steps between two
/// starts of the same phenotype, and data = binarize(reconstruct(P, W)).
/// Individual k draws from its own stream derived from the seed.
SyntheticDataset generate(const GenConfig& cfg);

/// Same, with the master seed drawn from `rng`.
SyntheticDataset generate(GenConfig cfg, Rng& rng);

/// generate() with the last cfg.repeated phenotypes replaced by single-feature
/// phenotypes active at every offset (distinct features when possible).
SyntheticDataset generate_repeated_event_phenotypes(const GenConfig& cfg);
SyntheticDataset generate_repeated_event_phenotypes(GenConfig cfg, Rng& rng);

/// Per-cell binarization: any nonzero value becomes 1.
Matrix binarize(const Matrix& m);

enum class NoiseKind { Additive, Destructive };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Additive;
  double additive_lambda = 0.0;
  double destructive_p = 0.0;

  void check() const;
};

struct NoisyData {
  IrregularTensor data;
  /// Flipped cells divided by the number of ones in the input.
  double level = 0.0;
  std::size_t flipped = 0;
};

/// Additive: each individual gains Poisson(lambda) events at distinct zero
/// cells (saturating when the matrix fills). Destructive: every event is
/// deleted independently with probability p.
NoisyData add_noise(const IrregularTensor& x, const NoiseSpec& spec, Rng& rng);

}  // namespace tempheno
