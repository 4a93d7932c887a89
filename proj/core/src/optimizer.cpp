#include "tempheno/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "tempheno/parallel.hpp"

namespace tempheno {

namespace {

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const LossBreakdown& loss) { return std::isfinite(loss.total); }

[[maybe_unused]] bool within_box(const PhenotypeTensor& phenotypes,
                                 const PathwayCollection& pathways) {
  auto in_box = [](const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
  };
  return std::all_of(phenotypes.data.begin(), phenotypes.data.end(), in_box) &&
         std::all_of(pathways.matrices.begin(), pathways.matrices.end(), in_box);
}

void check_window(std::size_t window, const IrregularTensor& x) {
  const std::size_t shortest = x.min_duration();
  if (window > shortest) {
    throw Error(ErrorCode::WindowTooLarge, "window " + std::to_string(window) +
                                               " exceeds shortest duration " +
                                               std::to_string(shortest));
  }
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = uniform01(rng);
  return m;
}

}  // namespace

void Adam::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  ++steps_;
  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    first_[i] = b1 * first_[i] + (1.0 - b1) * grad[i];
    second_[i] = b2 * second_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = first_[i] / correction1;
    const double v_hat = second_[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + settings_.epsilon);
  }
}

void TrainConfig::check() const {
  hp.check();
  if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0) || !(adam.beta2 > 0.0 && adam.beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Adam betas must lie in (0,1)");
  }
  if (!(adam.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "Adam epsilon must be > 0");
  if (record_loss_every == 0) {
    throw Error(ErrorCode::InvalidArgument, "record_loss_every must be positive");
  }
}

NonFiniteLossError::NonFiniteLossError(std::size_t epoch, TrainedModel last_finite)
    : Error(ErrorCode::NonFiniteLoss,
            "objective became non-finite during epoch " + std::to_string(epoch) +
                "; lower the learning rate"),
      epoch_(epoch),
      last_finite_(std::move(last_finite)) {}

PathwayCollection init_pathways(std::size_t rank, std::size_t window, const IrregularTensor& x,
                                Rng& rng) {
  check_window(window, x);
  PathwayCollection out;
  out.matrices.reserve(x.individuals());
  for (const Matrix& m : x.matrices) {
    out.matrices.push_back(uniform_matrix(rank, pathway_length(m.cols(), window), rng));
  }
  return out;
}

Initialization init(const HyperParams& hp, const IrregularTensor& x, Rng& rng) {
  hp.check();
  check_window(hp.window, x);
  Initialization out;
  out.phenotypes.feature_names = x.feature_names;
  out.phenotypes.data.reserve(hp.rank);
  for (std::size_t r = 0; r < hp.rank; ++r) {
    out.phenotypes.data.push_back(uniform_matrix(x.features(), hp.window, rng));
  }
  out.pathways = init_pathways(hp.rank, hp.window, x, rng);
  return out;
}

TrainedModel train(const IrregularTensor& x, const TrainConfig& cfg, Rng& rng) {
  cfg.check();
  require_valid(x);
  const HyperParams& hp = cfg.hp;

  TrainedModel model;
  model.config = cfg;
  model.rng_seed = hp.rng_seed;
  auto [phenotypes, pathways] = init(hp, x, rng);
  model.phenotypes = std::move(phenotypes);
  model.pathways = std::move(pathways);

  const std::size_t count = x.individuals();
  std::vector<Adam> phenotype_state(hp.rank, Adam(x.features() * hp.window, cfg.adam));
  std::vector<Adam> pathway_state;
  pathway_state.reserve(count);
  for (const Matrix& w : model.pathways.matrices) pathway_state.emplace_back(w.size(), cfg.adam);

  auto record = [&](std::size_t epoch) {
    const LossBreakdown loss = total_loss(model.phenotypes, model.pathways, x, hp);
    if (!all_finite(loss)) throw NonFiniteLossError(epoch, model);
    model.loss_history.push_back({epoch, loss});
  };
  record(0);
  TrainedModel last_finite = model;

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::min(hp.batch_size, count);

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    if (cfg.shuffle) shuffle_in_place(order, rng);
    for (std::size_t start = 0; start < count; start += batch) {
      const std::span<const std::size_t> members(order.data() + start,
                                                 std::min(batch, count - start));

      const Gradients gp =
          gradients(model.phenotypes, model.pathways, x, hp, GradTarget::Phenotypes, members);
      for (std::size_t r = 0; r < hp.rank; ++r) {
        if (!all_finite(gp.grad_phenotypes[r].values())) {
          throw NonFiniteLossError(epoch, std::move(last_finite));
        }
        phenotype_state[r].step(model.phenotypes[r].values(), gp.grad_phenotypes[r].values(),
                                hp.learning_rate);
        model.phenotypes[r].clip(0.0, 1.0);
      }

      const Gradients gw =
          gradients(model.phenotypes, model.pathways, x, hp, GradTarget::Pathways, members);
      for (std::size_t j = 0; j < members.size(); ++j) {
        const std::size_t k = members[j];
        if (!all_finite(gw.grad_pathways[j].values())) {
          throw NonFiniteLossError(epoch, std::move(last_finite));
        }
        pathway_state[k].step(model.pathways[k].values(), gw.grad_pathways[j].values(),
                              hp.learning_rate);
        model.pathways[k].clip(0.0, 1.0);
      }
    }
    assert(within_box(model.phenotypes, model.pathways));
    if (epoch % cfg.record_loss_every == 0 || epoch == hp.epochs) {
      record(epoch);
      last_finite = model;
    }
  }
  return model;
}

TrainedModel train(const IrregularTensor& x, const TrainConfig& cfg) {
  Rng rng(cfg.hp.rng_seed);
  return train(x, cfg, rng);
}

PathwayCollection project(const PhenotypeTensor& phenotypes, const IrregularTensor& x,
                          const TrainConfig& cfg, Rng& rng) {
  cfg.check();
  require_valid(x);
  if (x.features() != phenotypes.features()) {
    throw Error(ErrorCode::FeatureMismatch, "model has " + std::to_string(phenotypes.features()) +
                                                " features, data has " +
                                                std::to_string(x.features()));
  }
  const std::size_t window = phenotypes.window();
  PathwayCollection out = init_pathways(phenotypes.rank(), window, x, rng);
  const HyperParams& hp = cfg.hp;

  // Pathways are independent once the phenotypes are frozen.
  std::vector<char> diverged(x.individuals(), 0);
  parallel_for(x.individuals(), [&](std::size_t k) {
    Matrix& w = out[k];
    Adam state(w.size(), cfg.adam);
    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
      const Matrix xhat = reconstruct(phenotypes, w);
      const Matrix dloss = bernoulli_derivative(xhat, x.matrices[k], hp.log_epsilon);
      Matrix grad = pathway_gradient(dloss, phenotypes);
      add_nonsuccession_gradient(w, window, hp.log_epsilon, hp.nonsuccession_weight, grad);
      if (!all_finite(grad.values())) {
        diverged[k] = 1;
        return;
      }
      state.step(w.values(), grad.values(), hp.learning_rate);
      w.clip(0.0, 1.0);
    }
  }, 1);
  if (std::any_of(diverged.begin(), diverged.end(), [](char d) { return d != 0; })) {
    throw Error(ErrorCode::NonFiniteLoss, "projection diverged; lower the learning rate");
  }
  return out;
}

PathwayCollection project(const TrainedModel& model, const IrregularTensor& x,
                          const TrainConfig& cfg) {
  Rng rng(mix_seed(model.rng_seed, 0x70726f6aULL));
  return project(model.phenotypes, x, cfg, rng);
}

Split split(const IrregularTensor& x, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0,1)");
  }
  const std::size_t count = x.individuals();
  if (count < 2) {
    throw Error(ErrorCode::TooFewIndividuals,
                "need at least 2 individuals to split, got " + std::to_string(count));
  }
  auto test_count =
      static_cast<std::size_t>(std::llround(static_cast<double>(count) * test_fraction));
  test_count = std::clamp<std::size_t>(test_count, 1, count - 1);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_in_place(order, rng);

  Split out;
  out.test_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
  out.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(test_count), order.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  out.train = x.subset(out.train_indices);
  out.test = x.subset(out.test_indices);
  return out;
}

}  // namespace tempheno
