#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "dlcluster/synth.hpp"
#include "dlcluster/trainer.hpp"
#include "oracles.hpp"

using namespace dlcluster;

namespace {

Dataset noisy_data(Rng& rng, std::size_t n, std::size_t d, double scale = 2.0) {
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = scale * rng.normal() + ((i % 2) ? 3.0 : 0.0);
  return Dataset(x);
}

Gmm random_model(Rng& rng, std::size_t k, std::size_t d) {
  Vector logits(static_cast<Eigen::Index>(k));
  Matrix mu(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  Matrix lv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < mu.rows(); ++c) {
    logits[c] = rng.normal();
    for (Eigen::Index j = 0; j < mu.cols(); ++j) {
      mu(c, j) = 2.0 * rng.normal();
      lv(c, j) = 0.5 * rng.normal();
    }
  }
  return Gmm(logits, mu, lv);
}

std::vector<UnitVector> directions(Rng& rng, std::size_t d, std::size_t count) {
  std::vector<UnitVector> us;
  for (std::size_t i = 0; i < count; ++i) us.push_back(sample_unit_vector(rng, d));
  return us;
}

// Mean over directions of kl_discrete on discretized marginals, straight from the marginal module.
double reference_kl(const Gmm& model, const KdeTarget& target, const std::vector<UnitVector>& us, std::size_t g) {
  double total = 0.0;
  for (const UnitVector& u : us) {
    const Mixture1D q = kde_marginal(target, u);
    const Mixture1D p = gmm_marginal(model, u);
    const auto grid = shared_grid(q, p, g, kGridPadSigmas);
    total += kl_discrete(discretize(q, grid), discretize(p, grid));
  }
  return total / static_cast<double>(us.size());
}

}  // namespace

TEST(Loss, MatchesReferenceDiscretization) {
  Rng rng(1);
  for (std::size_t n : {5u, 40u, 3000u}) {
    const Dataset data = noisy_data(rng, n, 2);
    const KdeTarget target(data);
    const Gmm model = random_model(rng, 3, 2);
    const auto us = directions(rng, 2, 6);
    const LossTerms l = loss(model, target, us, 0.0, 1024);
    EXPECT_NEAR(l.kl, reference_kl(model, target, us, 1024), 1e-10) << "N=" << n;
  }
}

TEST(Loss, ZeroForExactCopyOfSinglePointTarget) {
  Matrix x(1, 2);
  x << 0.5, -1.0;
  const Dataset data(x);
  Vector h(2);
  h << 0.7, 1.3;
  const KdeTarget target(data, h);
  const Gmm model = Gmm::from_constrained(Vector::Ones(1), x, h.transpose());
  Rng rng(2);
  const auto us = directions(rng, 2, 8);
  const LossAndGradient lg = loss_gradients(model, target, us, 1.0, 1024);
  EXPECT_NEAR(lg.loss.kl, 0.0, 1e-9);
  EXPECT_NEAR(lg.gradient.weight_logits.cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(lg.gradient.means.cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(lg.gradient.log_vars.cwiseAbs().maxCoeff(), 0.0, 1e-9);
}

TEST(Loss, PenaltyComposition) {
  Rng rng(3);
  const Dataset data = noisy_data(rng, 30, 2);
  const KdeTarget target(data);
  const Gmm model = random_model(rng, 3, 2);
  const auto us = directions(rng, 2, 4);
  const LossTerms off = loss(model, target, us, 0.0, 256);
  EXPECT_EQ(off.total, off.kl);
  const LossTerms on = loss(model, target, us, 2.5, 256);
  EXPECT_NEAR(on.total, on.kl + 2.5 * on.wsd, 1e-12);
  EXPECT_NEAR(on.wsd, weight_std(model), 1e-15);

  const Gmm equal(Vector::Zero(3), model.means(), model.log_vars());
  const LossTerms eq = loss(equal, target, us, 7.0, 256);
  EXPECT_EQ(eq.wsd, 0.0);
  EXPECT_EQ(eq.total, eq.kl);
}

TEST(Loss, DimensionErrors) {
  Rng rng(4);
  const Dataset data = noisy_data(rng, 10, 2);
  const KdeTarget target(data);
  const auto us2 = directions(rng, 2, 2);
  const auto us3 = directions(rng, 3, 2);
  EXPECT_THROW(loss(random_model(rng, 2, 3), target, us3, 1.0, 64), std::invalid_argument);
  EXPECT_THROW(loss(random_model(rng, 2, 2), target, us3, 1.0, 64), std::invalid_argument);
  EXPECT_THROW(loss(random_model(rng, 2, 2), target, {}, 1.0, 64), std::invalid_argument);
  EXPECT_THROW(loss(random_model(rng, 2, 2), target, us2, 1.0, 1), std::invalid_argument);
}

TEST(LossGradients, PenaltyDoesNotTouchMeansOrVariances) {
  Rng rng(5);
  const Dataset data = noisy_data(rng, 20, 2);
  const KdeTarget target(data);
  const Gmm model = random_model(rng, 3, 2);
  const auto us = directions(rng, 2, 4);
  const auto a = loss_gradients(model, target, us, 0.0, 512);
  const auto b = loss_gradients(model, target, us, 5.0, 512);
  EXPECT_TRUE((a.gradient.means.array() == b.gradient.means.array()).all());
  EXPECT_TRUE((a.gradient.log_vars.array() == b.gradient.log_vars.array()).all());
  EXPECT_FALSE((a.gradient.weight_logits.array() == b.gradient.weight_logits.array()).all());
}

TEST(LossGradients, MatchFiniteDifferences) {
  Rng rng(6);
  const double h = 1e-4;
  for (int inst = 0; inst < 8; ++inst) {
    const std::size_t d = 1 + rng.uniform_index(3), k = 1 + rng.uniform_index(3), n = 2 + rng.uniform_index(19);
    const Dataset data = noisy_data(rng, n, d);
    const KdeTarget target(data);
    const Gmm model = random_model(rng, k, d);
    const auto us = directions(rng, d, 4);
    const double c = rng.uniform() * 2.0;
    const GmmGradient g = loss_gradients(model, target, us, c, 512).gradient;
    auto f = [&](const Vector& lg, const Matrix& mu, const Matrix& lv) {
      return loss(Gmm(lg, mu, lv), target, us, c, 512).total;
    };
    auto check = [&](double analytic, double numeric) {
      EXPECT_NEAR(analytic, numeric, std::max(1e-4, 1e-3 * std::abs(numeric)));
    };
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(k); ++a) {
      check(g.weight_logits[a], oracle::central_difference(
                                    [&](double v) {
                                      Vector lg = model.weight_logits();
                                      lg[a] = v;
                                      return f(lg, model.means(), model.log_vars());
                                    },
                                    model.weight_logits()[a], h));
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
        check(g.means(a, j), oracle::central_difference(
                                 [&](double v) {
                                   Matrix mu = model.means();
                                   mu(a, j) = v;
                                   return f(model.weight_logits(), mu, model.log_vars());
                                 },
                                 model.means()(a, j), h));
        check(g.log_vars(a, j), oracle::central_difference(
                                    [&](double v) {
                                      Matrix lv = model.log_vars();
                                      lv(a, j) = v;
                                      return f(model.weight_logits(), model.means(), lv);
                                    },
                                    model.log_vars()(a, j), h));
      }
    }
  }
}

TEST(LossGradients, IndependentOfThreadCount) {
  Rng rng(7);
  const Dataset data = noisy_data(rng, 500, 3);
  const KdeTarget target(data);
  const Gmm model = random_model(rng, 3, 3);
  const auto us = directions(rng, 3, 9);
  setenv("DLCLUSTER_THREADS", "1", 1);
  const auto one = loss_gradients(model, target, us, 1.0, 256);
  setenv("DLCLUSTER_THREADS", "3", 1);
  const auto three = loss_gradients(model, target, us, 1.0, 256);
  unsetenv("DLCLUSTER_THREADS");
  EXPECT_EQ(one.loss.total, three.loss.total);
  EXPECT_TRUE((one.gradient.means.array() == three.gradient.means.array()).all());
  EXPECT_TRUE((one.gradient.log_vars.array() == three.gradient.log_vars.array()).all());
  EXPECT_TRUE((one.gradient.weight_logits.array() == three.gradient.weight_logits.array()).all());
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  for (double g : {3.7, -0.002, 1e3}) {
    AdamState adam(1, 0.9, 0.999, 0.0);
    std::vector<double> p{1.0};
    adam.step(p, std::vector<double>{g}, 0.01);
    EXPECT_NEAR(p[0], 1.0 - 0.01 * (g > 0 ? 1 : -1), 1e-6);
  }
  AdamState adam(1);
  std::vector<double> p{0.0};
  adam.step(p, std::vector<double>{2.0}, 1e-3);
  EXPECT_NEAR(p[0], -1e-3, 1e-6);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ZeroGradientIsFixedPoint) {
  AdamState adam(3);
  std::vector<double> p{1.0, -2.0, 0.5};
  const auto before = p;
  for (int i = 0; i < 100; ++i) adam.step(p, std::vector<double>(3, 0.0), 0.1);
  EXPECT_EQ(p, before);
}

TEST(Adam, EqualHistoriesEqualUpdates) {
  AdamState adam(2);
  std::vector<double> p{0.0, 0.0};
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const double g = rng.normal();
    adam.step(p, std::vector<double>{g, g}, 0.05);
  }
  EXPECT_EQ(p[0], p[1]);
}

TEST(Adam, RejectsBadInput) {
  AdamState adam(2);
  std::vector<double> p{0.0, 0.0};
  EXPECT_THROW(adam.step(p, std::vector<double>{1.0}, 0.1), std::invalid_argument);
  EXPECT_THROW(adam.step(p, std::vector<double>{1.0, NAN}, 0.1), std::invalid_argument);
  EXPECT_THROW(adam.step(p, std::vector<double>{INFINITY, 0.0}, 0.1), std::invalid_argument);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.lr, 1e-4);
  EXPECT_EQ(c.unit_vectors_per_step, 32u);
  EXPECT_EQ(c.wsd_weight, 1.0);
  EXPECT_EQ(c.grid_size, 1024u);
  EXPECT_EQ(c.plateau_patience, 200u);
  EXPECT_EQ(c.plateau_tol, 1e-6);
  auto bad = c;
  bad.lr = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.iters = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.unit_vectors_per_step = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.wsd_weight = -1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(InitialModel, UniformWeightsAndScaledVariance) {
  Rng rng(9);
  const Dataset data = noisy_data(rng, 50, 3);
  Matrix means = data.points().topRows(4);
  const Gmm m = initial_model(data, means);
  EXPECT_TRUE((m.weight_logits().array() == 0.0).all());
  const Vector var = coordinate_variance(data);
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(m.variances()(c, j), var[j] / 16.0, 1e-12 * var[j]);
  EXPECT_TRUE((m.means().array() == means.array()).all());
}

TEST(Fit, RejectsKAboveN) {
  Rng rng(10);
  const Dataset data = noisy_data(rng, 3, 2);
  TrainConfig c;
  c.k = 4;
  EXPECT_THROW(fit(data, c), std::invalid_argument);
}

TEST(Fit, SingleComponentStaysAtCentroid) {
  Rng rng(11);
  const Dataset data = noisy_data(rng, 200, 2);
  TrainConfig c;
  c.k = 1;
  c.iters = 300;
  c.seed = 5;
  const TrainReport r = fit(data, c);
  const Vector centroid = data.points().colwise().mean().transpose();
  EXPECT_LT((r.final_model.means().row(0).transpose() - centroid).norm(), 0.1);
}

TEST(Fit, HistoryInvariantsAndDeterminism) {
  Rng rng(12);
  const Dataset data = noisy_data(rng, 150, 2);
  TrainConfig c;
  c.k = 3;
  c.iters = 60;
  c.seed = 99;
  c.wsd_weight = 3.0;
  c.grid_size = 256;
  const TrainReport a = fit(data, c);
  setenv("DLCLUSTER_THREADS", "2", 1);
  const TrainReport b = fit(data, c);
  unsetenv("DLCLUSTER_THREADS");
  ASSERT_EQ(a.history.size(), b.history.size());
  EXPECT_EQ(a.iterations_run, a.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    const IterationRecord& r = a.history[i];
    EXPECT_EQ(r.iteration, i);
    EXPECT_EQ(r.total, b.history[i].total);
    EXPECT_EQ(r.kl, b.history[i].kl);
    EXPECT_NEAR(r.total, r.kl + c.wsd_weight * r.wsd, 1e-9);
    EXPECT_GE(r.kl, -1e-9);
  }
  EXPECT_TRUE((a.final_model.means().array() == b.final_model.means().array()).all());
  EXPECT_EQ(assign(a.final_model, data).labels, assign(b.final_model, data).labels);
  EXPECT_NEAR(a.final_model.weights().sum(), 1.0, 1e-12);
  EXPECT_TRUE((a.final_model.variances().array() > 0).all());
}

TEST(Fit, SeedChangesRun) {
  Rng rng(13);
  const Dataset data = noisy_data(rng, 100, 2);
  TrainConfig c;
  c.k = 2;
  c.iters = 5;
  c.grid_size = 128;
  c.seed = 1;
  const TrainReport a = fit(data, c);
  c.seed = 2;
  const TrainReport b = fit(data, c);
  EXPECT_NE(a.history.back().total, b.history.back().total);
}

TEST(Fit, PlateauStopsEarly) {
  Rng rng(14);
  const Dataset data = noisy_data(rng, 100, 2);
  TrainConfig c;
  c.k = 2;
  c.iters = 1000;
  c.grid_size = 128;
  c.plateau_patience = 5;
  c.plateau_tol = 10.0;  // no step can improve the best loss by this much
  const TrainReport r = fit(data, c);
  EXPECT_EQ(r.stop_reason, StopReason::plateau);
  EXPECT_EQ(r.iterations_run, 6u);
}

TEST(Fit, RandomInitRuns) {
  Rng rng(15);
  const Dataset data = noisy_data(rng, 100, 3);
  TrainConfig c;
  c.k = 3;
  c.iters = 20;
  c.grid_size = 128;
  c.init = InitMethod::random;
  const TrainReport r = fit(data, c);
  EXPECT_EQ(r.iterations_run, 20u);
  EXPECT_EQ(r.stop_reason, StopReason::max_iters);
}
