#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "support.hpp"
#include "tempheno/metrics.hpp"
#include "tempheno/optimizer.hpp"
#include "tempheno/synthgen.hpp"

using namespace tempheno;
using namespace tempheno::testing;

namespace {

bool in_box(const Matrix& m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

bool in_box(const TrainedModel& model) {
  for (const auto& m : model.phenotypes.data) {
    if (!in_box(m)) return false;
  }
  for (const auto& m : model.pathways.matrices) {
    if (!in_box(m)) return false;
  }
  return true;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SyntheticDataset small_dataset(std::uint64_t seed, std::size_t individuals = 40) {
  GenConfig cfg;
  cfg.individuals = individuals;
  cfg.features = 8;
  cfg.rank = 2;
  cfg.duration = 8;
  cfg.seed = seed;
  return generate(cfg);
}

// Reconstruction plus beta-weighted nonsuccession for one individual.
double individual_objective(const PhenotypeTensor& p, const Matrix& w, const Matrix& x,
                            const HyperParams& hp) {
  return bernoulli_loss(reconstruct(p, w), x, hp.log_epsilon) +
         hp.nonsuccession_weight * nonsuccession_term(w, p.window(), hp.log_epsilon);
}

}  // namespace

TEST_CASE("init is deterministic and shaped per individual") {
  Rng rng(1);
  const auto x = random_tensor(3, 4, {5, 7, 3}, rng);
  HyperParams hp;
  hp.rank = 2;
  hp.window = 3;
  Rng a(9), b(9);
  const auto first = init(hp, x, a);
  const auto second = init(hp, x, b);
  CHECK(first.phenotypes.data == second.phenotypes.data);
  CHECK(first.pathways.matrices == second.pathways.matrices);
  CHECK(first.pathways[0].cols() == 3);
  CHECK(first.pathways[2].cols() == 1);
  for (const auto& m : first.phenotypes.data) CHECK(in_box(m));

  hp.window = 4;
  Rng c(9);
  try {
    init(hp, x, c);
    FAIL("expected WindowTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooLarge);
  }
}

TEST_CASE("zero epochs returns the initialization") {
  const auto ds = small_dataset(2, 10);
  TrainConfig cfg;
  cfg.hp.rank = 2;
  cfg.hp.epochs = 0;
  Rng a(5), b(5);
  const auto model = train(ds.data, cfg, a);
  const auto start = init(cfg.hp, ds.data, b);
  CHECK(model.phenotypes.data == start.phenotypes.data);
  CHECK(model.pathways.matrices == start.pathways.matrices);
  REQUIRE(model.loss_history.size() == 1);
  CHECK(model.loss_history[0].epoch == 0);
}

TEST_CASE("training keeps every entry in the unit box") {
  const auto ds = small_dataset(3);
  TrainConfig cfg;
  cfg.hp.rank = 3;
  cfg.hp.learning_rate = 0.05;
  cfg.hp.batch_size = 7;
  cfg.hp.epochs = 30;
  const auto model = train(ds.data, cfg);
  CHECK(in_box(model));
  CHECK(model.loss_history.back().epoch == 30);
  for (const auto& record : model.loss_history) CHECK(std::isfinite(record.loss.total));
}

TEST_CASE("adam takes bias-corrected steps of size lr") {
  Adam adam(2, AdamSettings{});
  std::vector<double> params = {0.5, 0.5};
  const std::vector<double> grad = {2.0, -3.0};
  adam.step(params, grad, 0.01);
  CHECK(params[0] == doctest::Approx(0.49).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(0.51).epsilon(1e-6));
  CHECK(adam.steps() == 1);
}

TEST_CASE("projection of an empty individual drives pathways to zero") {
  Rng rng(4);
  IrregularTensor x;
  x.matrices = {Matrix(6, 10)};
  x.feature_names = numbered("f", 6);
  x.individual_ids = {"empty"};
  const auto p = random_phenotypes(4, 6, 3, rng);
  TrainConfig cfg;
  cfg.hp.rank = 4;
  cfg.hp.learning_rate = 1e-2;
  cfg.hp.epochs = 200;
  const auto w = project(p, x, cfg, rng);
  REQUIRE(w.individuals() == 1);
  CHECK(w[0].sum() < 0.05 * 4 * 8);
  CHECK(in_box(w[0]));
}

TEST_CASE("projecting a training individual recovers its training loss") {
  const auto ds = small_dataset(5, 60);
  TrainConfig cfg;
  cfg.hp.rank = 2;
  cfg.hp.learning_rate = 1e-2;
  cfg.hp.batch_size = 20;
  cfg.hp.epochs = 200;
  const auto model = train(ds.data, cfg);
  for (std::size_t k : {0u, 17u, 42u}) {
    const std::vector<std::size_t> one = {k};
    const auto single = ds.data.subset(one);
    const auto w = project(model, single, cfg);
    const double trained = individual_objective(model.phenotypes, model.pathways[k],
                                                ds.data.matrices[k], cfg.hp);
    const double projected =
        individual_objective(model.phenotypes, w[0], single.matrices[0], cfg.hp);
    CHECK(projected <= trained * 1.1);
  }
}

TEST_CASE("projection rejects a feature mismatch") {
  Rng rng(6);
  const auto x = random_tensor(2, 5, {6}, rng);
  try {
    project(random_phenotypes(2, 4, 2, rng), x, TrainConfig{}, rng);
    FAIL("expected FeatureMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FeatureMismatch);
  }
}

TEST_CASE("split sizes, determinism and disjointness") {
  Rng rng(7);
  const auto x = random_tensor(10, 2, {4}, rng);
  Rng a(3), b(3);
  const auto first = split(x, 0.3, a);
  const auto second = split(x, 0.3, b);
  CHECK(first.train.individuals() == 7);
  CHECK(first.test.individuals() == 3);
  CHECK(first.test_indices == second.test_indices);
  std::vector<std::size_t> all = first.train_indices;
  all.insert(all.end(), first.test_indices.begin(), first.test_indices.end());
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < 10; ++k) CHECK(all[k] == k);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(first.test.matrices[j] == x.matrices[first.test_indices[j]]);
  }

  Rng c(3);
  const auto tiny = random_tensor(2, 2, {4}, rng);
  const auto edge = split(tiny, 0.01, c);
  CHECK(edge.test.individuals() == 1);
  CHECK(edge.train.individuals() == 1);

  const auto lonely = random_tensor(1, 2, {4}, rng);
  try {
    split(lonely, 0.3, c);
    FAIL("expected TooFewIndividuals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewIndividuals);
  }
}

TEST_CASE("loss history is bitwise reproducible across thread counts") {
  const auto ds = small_dataset(8);
  TrainConfig cfg;
  cfg.hp.rank = 2;
  cfg.hp.batch_size = 16;
  cfg.hp.epochs = 15;
  cfg.hp.rng_seed = 21;
  auto run = [&](const char* threads) {
    ::setenv("TEMPHENO_THREADS", threads, 1);
    auto model = train(ds.data, cfg);
    ::unsetenv("TEMPHENO_THREADS");
    return model;
  };
  const auto a = run("1");
  const auto b = run("1");
  const auto c = run("4");
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t e = 0; e < a.loss_history.size(); ++e) {
    CHECK(a.loss_history[e].loss.total == b.loss_history[e].loss.total);
    CHECK(a.loss_history[e].loss.total == c.loss_history[e].loss.total);
  }
  CHECK(a.phenotypes.data == c.phenotypes.data);
}

TEST_CASE("loss trend on the default synthetic instance" * doctest::timeout(120)) {
  GenConfig gen;
  gen.seed = 1;
  const auto ds = generate(gen);
  TrainConfig cfg;
  const auto model = train(ds.data, cfg);
  const auto& history = model.loss_history;
  REQUIRE(history.size() == cfg.hp.epochs + 1);
  constexpr std::size_t span = 20;
  double previous = 0.0;
  for (std::size_t end = span; end <= history.size(); ++end) {
    double mean = 0.0;
    for (std::size_t e = end - span; e < end; ++e) mean += history[e].loss.total;
    mean /= span;
    if (end > span) CHECK(mean <= previous * (1.0 + 1e-12));
    previous = mean;
  }
}

TEST_CASE("full-batch and mini-batch training reach similar FIT_X" * doctest::timeout(600)) {
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig gen;
    gen.seed = seed;
    const auto ds = generate(gen);
    Rng split_rng(mix_seed(seed, 1));
    const auto parts = split(ds.data, 0.3, split_rng);
    auto test_fit = [&](std::size_t batch) {
      TrainConfig cfg;
      cfg.hp.batch_size = batch;
      cfg.hp.rng_seed = seed;
      const auto model = train(parts.train, cfg);
      const auto w = project(model, parts.test, cfg);
      return fit(parts.test.matrices, reconstruct_all(model.phenotypes, w));
    };
    gaps.push_back(std::abs(test_fit(parts.train.individuals()) - test_fit(50)));
  }
  CHECK(median(gaps) < 0.1);
}
