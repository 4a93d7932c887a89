#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tempheno/loss.hpp"
#include "tempheno/random.hpp"
#include "tempheno/tensor.hpp"

namespace tempheno {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moment state for one block of parameters.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, AdamSettings settings)
      : settings_(settings), first_(size, 0.0), second_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad, double learning_rate);
  std::size_t steps() const noexcept { return steps_; }

 private:
  AdamSettings settings_;
  std::vector<double> first_;
  std::vector<double> second_;
  std::size_t steps_ = 0;
};

struct TrainConfig {
  HyperParams hp;
  AdamSettings adam;
  bool shuffle = true;
  std::size_t record_loss_every = 1;

  void check() const;
};

struct LossRecord {
  std::size_t epoch = 0;
  LossBreakdown loss;
};

/// Phenotypes are the model; training-set pathways are kept for diagnostics.
struct TrainedModel {
  PhenotypeTensor phenotypes;
  PathwayCollection pathways;
  TrainConfig config;
  std::vector<LossRecord> loss_history;
  std::uint64_t rng_seed = 0;
};

/// Raised when the objective stops being finite. Carries the state at the end
/// of the last epoch whose loss was finite.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(std::size_t epoch, TrainedModel last_finite);

  std::size_t epoch() const noexcept { return epoch_; }
  const TrainedModel& last_finite() const noexcept { return last_finite_; }

 private:
  std::size_t epoch_;
  TrainedModel last_finite_;
};

struct Initialization {
  PhenotypeTensor phenotypes;
  PathwayCollection pathways;
};

/// U(0,1) phenotypes and pathways. Phenotypes are drawn first, then pathways in
/// individual order.
Initialization init(const HyperParams& hp, const IrregularTensor& x, Rng& rng);

/// Uniform random pathways only, shaped for `x`.
PathwayCollection init_pathways(std::size_t rank, std::size_t window, const IrregularTensor& x,
                                Rng& rng);

/// Alternating projected gradient descent. For every shuffled mini-batch:
/// one Adam step on the phenotypes then clip to [0,1], then one Adam step on
/// each batch pathway then clip. Runs exactly cfg.hp.epochs epochs.
TrainedModel train(const IrregularTensor& x, const TrainConfig& cfg, Rng& rng);

/// Same as above with the generator seeded from cfg.hp.rng_seed.
TrainedModel train(const IrregularTensor& x, const TrainConfig& cfg);

/// Pathways for new individuals with the phenotypes frozen: minimizes the
/// reconstruction loss plus beta * nonsuccession (no sparsity term) by
/// projected Adam, cfg.hp.epochs steps per individual.
PathwayCollection project(const PhenotypeTensor& phenotypes, const IrregularTensor& x,
                          const TrainConfig& cfg, Rng& rng);

/// Projection with the generator derived from the model's seed.
PathwayCollection project(const TrainedModel& model, const IrregularTensor& x,
                          const TrainConfig& cfg);

struct Split {
  IrregularTensor train;
  IrregularTensor test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Uniform disjoint split; the test side holds round(K * test_fraction)
/// individuals, clamped so each side keeps at least one. Both sides keep the
/// original individual order.
Split split(const IrregularTensor& x, double test_fraction, Rng& rng);

}  // namespace tempheno
