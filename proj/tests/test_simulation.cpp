#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cogmab/simulation.hpp"

using namespace cogmab;
using Catch::Matchers::WithinAbs;

namespace {
ExperimentConfig base_config() {
  ExperimentConfig config;
  config.users = 2;
  config.mu = {0.2, 0.8};
  config.horizon = 500;
  config.replications = 1;
  config.policy = PolicyKind::rho_rand;
  config.seed = 42;
  config.parallelism = 1;
  return config;
}
}  // namespace

TEST_CASE("config validation names the violated constraint") {
  ExperimentConfig config = base_config();
  config.users = 3;
  CHECK_THROWS_WITH(config.validate(),
                    Catch::Matchers::ContainsSubstring("U <= channels"));
  config = base_config();
  config.horizon = 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.replications = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.policy = PolicyKind::single;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.checkpoints = {10, 10};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("identical seeds give identical ledgers") {
  const ExperimentConfig config = base_config();
  const ReplicationResult a = run_replication(config, 0);
  const ReplicationResult b = run_replication(config, 0);
  CHECK(a.ledger == b.ledger);
  CHECK(a.regret_at == b.regret_at);
  const ReplicationResult c = run_replication(config, 1);
  CHECK_FALSE(a.ledger == c.ledger);
}

TEST_CASE("aggregated output is independent of the parallelism width") {
  ExperimentConfig config = base_config();
  config.replications = 12;
  config.parallelism = 1;
  const ExperimentResult serial = run_experiment(config);
  config.parallelism = 4;
  const ExperimentResult parallel = run_experiment(config);
  REQUIRE(serial.regret.mean == parallel.regret.mean);
  REQUIRE(serial.regret.stderr_ == parallel.regret.stderr_);
  REQUIRE(serial.best_collisions.mean == parallel.best_collisions.mean);
  REQUIRE(serial.mean_final_sensed == parallel.mean_final_sensed);
}

TEST_CASE("one-replication aggregate equals the replication") {
  ExperimentConfig config = base_config();
  const ReplicationResult rep = run_replication(config, 0);
  const ExperimentResult agg = run_experiment(config);
  REQUIRE(agg.regret.mean.size() == rep.regret_at.size());
  for (std::size_t p = 0; p < rep.regret_at.size(); ++p) {
    CHECK(agg.regret.mean[p] == rep.regret_at[p]);
    CHECK(agg.regret.stderr_[p] == 0.0);
  }
}

TEST_CASE("sensing conservation holds for every policy") {
  for (PolicyKind policy :
       {PolicyKind::centralized, PolicyKind::rho_rand, PolicyKind::rho_est,
        PolicyKind::perfect_rho_rand}) {
    ExperimentConfig config = base_config();
    config.policy = policy;
    const ReplicationResult rep = run_replication(config, 3);
    for (int j = 0; j < config.users; ++j) {
      std::int64_t total = 0;
      for (int i = 0; i < config.channels(); ++i) total += rep.ledger.sensed(j, i);
      REQUIRE(total == config.horizon);
    }
  }
}

TEST_CASE("the centralized policy never collides") {
  ExperimentConfig config = base_config();
  config.users = 3;
  config.mu = {0.2, 0.4, 0.6, 0.8};
  config.policy = PolicyKind::centralized;
  config.replications = 5;
  const ExperimentResult result = run_experiment(config);
  for (double m : result.best_collisions.mean) CHECK(m == 0.0);
}

TEST_CASE("cumulative series are monotone") {
  ExperimentConfig config = base_config();
  config.users = 3;
  config.mu = {0.15, 0.35, 0.55, 0.75};
  config.policy = PolicyKind::rho_est;
  config.replications = 4;
  const ExperimentResult result = run_experiment(config);
  for (std::size_t p = 1; p < result.checkpoints.size(); ++p) {
    CHECK(result.best_collisions.mean[p] >= result.best_collisions.mean[p - 1]);
    CHECK(result.wrong_order.mean[p] >= result.wrong_order.mean[p - 1]);
    CHECK(result.successes.mean[p] >= result.successes.mean[p - 1]);
    CHECK(result.uhat_max.mean[p] >= result.uhat_max.mean[p - 1]);
  }
  CHECK(result.checkpoints.back() == config.horizon);
}

TEST_CASE("per-user success means add up to the success series") {
  ExperimentConfig config = base_config();
  config.replications = 8;
  const ExperimentResult result = run_experiment(config);
  double total = 0.0;
  for (double s : result.mean_final_successes) total += s;
  CHECK_THAT(total, Catch::Matchers::WithinRel(result.successes.mean.back(), 1e-12));
}

TEST_CASE("explicit checkpoints are honored") {
  ExperimentConfig config = base_config();
  config.checkpoints = {5, 50, 500};
  const ReplicationResult rep = run_replication(config, 0);
  CHECK(rep.regret_at.size() == 3);
  CHECK(rep.best_collisions_at.size() == 3);
}

TEST_CASE("doubling the replications shrinks the standard error") {
  ExperimentConfig config = base_config();
  config.users = 2;
  config.mu = {0.3, 0.5, 0.7, 0.9};
  config.horizon = 400;
  config.replications = 200;
  const double se_small = run_experiment(config).regret.stderr_.back();
  config.replications = 400;
  const double se_big = run_experiment(config).regret.stderr_.back();
  const double ratio = se_big / se_small;
  CHECK(ratio > 0.55);
  CHECK(ratio < 0.9);
}

TEST_CASE("perfect-knowledge settling matches the exact chain solve") {
  ExperimentConfig config;
  config.users = 2;
  config.mu = {0.3, 0.7};
  config.horizon = 64;
  config.policy = PolicyKind::perfect_rho_rand;
  config.feedback = FeedbackMode::sensing_overlap;
  config.seed = 5;
  config.parallelism = 1;

  const int runs = 20000;
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    const ReplicationResult rep = run_replication(config, r);
    REQUIRE(rep.slots_to_orthogonality >= 0);
    sum += static_cast<double>(rep.slots_to_orthogonality);
  }
  const double mean = sum / runs;
  CHECK_THAT(mean, WithinAbs(2.0, 0.05));
}

TEST_CASE("a lone user under the estimating policy never bumps its estimate") {
  ExperimentConfig config = base_config();
  config.users = 1;
  config.policy = PolicyKind::rho_est;
  config.horizon = 2000;
  const ReplicationResult rep = run_replication(config, 0);
  CHECK(rep.final_uhat_max == 1);
  CHECK(rep.ledger.best_collisions == 0);
}

TEST_CASE("simulated centralized regret stays below its closed-form cap") {
  ExperimentConfig config;
  config.users = 4;
  config.mu = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.horizon = 2500;
  config.replications = 100;
  config.policy = PolicyKind::centralized;
  config.seed = 21;
  const ExperimentResult result = run_experiment(config);
  const double cap = finite_time_upper_bound(config.mu, config.users, 2500.0,
                                             BoundKind::centralized_gmean)
                         .value;
  CHECK(result.regret.mean.back() +
            3.0 * result.regret.stderr_.back() <= cap);
}

TEST_CASE("rank-randomized regret is sub-linear and under the bound surrogate") {
  ExperimentConfig config;
  config.users = 4;
  config.mu = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.horizon = 2500;
  config.replications = 100;
  config.policy = PolicyKind::rho_rand;
  config.seed = 22;
  config.checkpoints = {250, 1000, 2500};
  const ExperimentResult result = run_experiment(config);
  CHECK(result.regret.mean.back() > 0.0);
  CHECK(result.regret.mean[2] / 2500.0 < result.regret.mean[0] / 250.0);
  // Every checkpoint stays below the evaluable surrogate of the regret cap:
  // best availability times (bottom-channel time bound + collision bound).
  for (std::size_t p = 0; p < result.checkpoints.size(); ++p) {
    const auto slots = static_cast<double>(result.checkpoints[p]);
    const double surrogate =
        0.9 * (finite_time_upper_bound(config.mu, 4, slots,
                                       BoundKind::uworst_time).value +
               finite_time_upper_bound(config.mu, 4, slots,
                                       BoundKind::collisions).value);
    CHECK(result.regret.mean[p] - 3.0 * result.regret.stderr_[p] <= surrogate);
  }
}

TEST_CASE("regret grows with the channel count") {
  ExperimentConfig base;
  base.users = 2;
  base.mu = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  base.horizon = 2500;
  base.replications = 60;
  base.seed = 99;
  for (PolicyKind policy : {PolicyKind::centralized, PolicyKind::rho_rand}) {
    base.policy = policy;
    const std::vector<SweepPoint> pts = sweep(base, SweepAxis::channels, {3, 6, 9});
    double prev = -1.0;
    for (const SweepPoint& pt : pts) {
      REQUIRE(pt.result.has_value());
      const double regret = pt.result->regret.mean.back();
      CHECK(regret > prev);
      prev = regret;
    }
  }
}

TEST_CASE("regret grows when users and channels scale together") {
  for (PolicyKind policy : {PolicyKind::centralized, PolicyKind::rho_rand}) {
    double prev = -1.0;
    for (int users : {1, 2, 4}) {
      ExperimentConfig config;
      config.users = users;
      for (int i = 1; i <= 2 * users; ++i) config.mu.push_back(0.1 * i);
      config.horizon = 2500;
      config.replications = 60;
      config.seed = 99;
      config.policy = policy;
      const double regret = run_experiment(config).regret.mean.back();
      CHECK(regret > prev);
      prev = regret;
    }
  }
}

TEST_CASE("sweeps keep going past invalid points") {
  ExperimentConfig config = base_config();
  config.users = 2;
  config.mu = {0.1, 0.3, 0.5, 0.7, 0.9};
  config.horizon = 100;
  config.replications = 2;
  const std::vector<SweepPoint> points =
      sweep(config, SweepAxis::users, {1, 2, 9});
  REQUIRE(points.size() == 3);
  CHECK(points[0].result.has_value());
  CHECK(points[1].result.has_value());
  CHECK_FALSE(points[2].result.has_value());
  CHECK(points[2].error.find("9") != std::string::npos);
  CHECK(points[1].bounds.count("lower_centralized_coeff") == 1);
  CHECK(points[1].bounds.count("lower_distributed_coeff") == 1);
}

TEST_CASE("channel sweeps take prefixes of the availability vector") {
  ExperimentConfig config = base_config();
  config.users = 2;
  config.mu = {0.1, 0.3, 0.5, 0.7, 0.9};
  config.horizon = 100;
  config.replications = 2;
  const std::vector<SweepPoint> points =
      sweep(config, SweepAxis::channels, {2, 4, 6});
  CHECK(points[0].result.has_value());
  CHECK(points[1].result.has_value());
  CHECK_FALSE(points[2].result.has_value());  // template has only 5 channels
}
