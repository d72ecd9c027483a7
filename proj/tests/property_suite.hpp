#pragma once

// Randomized pathwise-identity suite shared by the unit tests and the
// acceptance runner. Each case draws a small instance, runs one replication
// with an observer asserting the per-slot identities, and re-runs it to
// confirm determinism.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cogmab/analysis.hpp"
#include "cogmab/simulation.hpp"

namespace cogmab::testing {

struct PropertyReport {
  std::int64_t cases = 0;
  std::int64_t slots_checked = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

inline PropertyReport run_property_suite(std::int64_t cases,
                                         std::uint64_t seed) {
  PropertyReport report;
  Rng pick(splitmix64(seed));

  for (std::int64_t c = 0; c < cases; ++c) {
    const int channels = 2 + static_cast<int>(pick.below(3));  // 2..4
    const int users = 1 + static_cast<int>(pick.below(
                              static_cast<std::uint64_t>(std::min(channels, 3))));
    ExperimentConfig config;
    config.users = users;
    for (int i = 0; i < channels; ++i)
      config.mu.push_back((static_cast<double>(i) + 0.5 +
                           0.4 * pick.next_double()) /
                          (channels + 1));
    config.horizon = channels + 1 + static_cast<std::int64_t>(pick.below(200));
    config.replications = 1;
    config.seed = pick.next_u64();
    config.parallelism = 1;
    config.feedback = pick.bernoulli(0.5) ? FeedbackMode::transmission
                                          : FeedbackMode::sensing_overlap;
    config.statistic = pick.bernoulli(0.5) ? Statistic::mean : Statistic::opt;
    const std::uint64_t policy_die = pick.below(users == 1 ? 5 : 4);
    switch (policy_die) {
      case 0: config.policy = PolicyKind::centralized; break;
      case 1: config.policy = PolicyKind::rho_rand; break;
      case 2: config.policy = PolicyKind::rho_est; break;
      case 3: config.policy = PolicyKind::perfect_rho_rand; break;
      default: config.policy = PolicyKind::single; break;
    }

    const GroundTruth truth(ChannelParams(config.mu), users);
    std::ostringstream scene;
    scene << "case " << c << " policy " << static_cast<int>(config.policy)
          << " U=" << users << " C=" << channels << " n=" << config.horizon
          << " seed=" << config.seed;
    auto fail = [&](const std::string& what, std::int64_t slot) {
      report.failures.push_back(scene.str() + " slot " + std::to_string(slot) +
                                ": " + what);
    };

    std::vector<int> prev_rank(static_cast<std::size_t>(users), -1);
    std::vector<bool> prev_collided(static_cast<std::size_t>(users), false);
    std::vector<int> prev_uhat(static_cast<std::size_t>(users), 0);
    const bool rank_based = config.policy == PolicyKind::rho_rand ||
                            config.policy == PolicyKind::rho_est ||
                            config.policy == PolicyKind::perfect_rho_rand;

    auto observer = [&](const SlotView& view) {
      ++report.slots_checked;
      // Sensing conservation: every user sensed exactly once per slot.
      for (int j = 0; j < users; ++j) {
        std::int64_t total = 0;
        for (int i = 0; i < channels; ++i) total += view.ledger.sensed(j, i);
        if (total != view.slot) fail("sensing conservation broken", view.slot);
        for (int i = 0; i < channels; ++i)
          if (view.ledger.sole(j, i) > view.ledger.sensed(j, i))
            fail("sole count exceeds sensing count", view.slot);
      }
      // Collision accounting identity, exact after every slot.
      if (best_collisions_from_counts(view.ledger, truth) !=
          view.ledger.best_collisions)
        fail("collision accounting identity broken", view.slot);
      // Centralized access never collides.
      if (config.policy == PolicyKind::centralized &&
          view.ledger.best_collisions != 0)
        fail("centralized access collided", view.slot);
      // Rank retention: no collision feedback, no rank change.
      if (rank_based && !view.init_phase) {
        for (int j = 0; j < users; ++j) {
          const auto& st = view.states[static_cast<std::size_t>(j)];
          if (prev_rank[static_cast<std::size_t>(j)] >= 0 &&
              !prev_collided[static_cast<std::size_t>(j)] &&
              st.rank != prev_rank[static_cast<std::size_t>(j)])
            fail("rank changed without a collision", view.slot);
          prev_rank[static_cast<std::size_t>(j)] = st.rank;
          prev_collided[static_cast<std::size_t>(j)] =
              collision_feedback(view.outcome, static_cast<std::size_t>(j),
                                 config.feedback);
        }
      }
      // User-count estimates never decrease.
      for (int j = 0; j < users; ++j) {
        const auto& st = view.states[static_cast<std::size_t>(j)];
        if (st.u_hat < prev_uhat[static_cast<std::size_t>(j)])
          fail("user-count estimate decreased", view.slot);
        prev_uhat[static_cast<std::size_t>(j)] = st.u_hat;
        if (st.rank >= st.u_hat) fail("rank outside the estimate", view.slot);
      }
    };

    const ReplicationResult rep = run_replication(config, 0, observer);

    // Pathwise regret sandwich with empirical counters.
    const RegretBreakdown r = compute_regret(rep.ledger, config.mu, users);
    if (r.regret > r.uworst_term + r.collision_term + 1e-9)
      fail("regret exceeded its pathwise upper bound", config.horizon);
    // Realized regret equals the definition evaluated directly.
    double direct = optimal_reward(config.mu, users,
                                   static_cast<double>(config.horizon));
    for (int i = 0; i < channels; ++i)
      for (int j = 0; j < users; ++j)
        direct -= config.mu[static_cast<std::size_t>(i)] *
                  static_cast<double>(rep.ledger.sole(j, i));
    if (std::abs(direct - r.regret) > 1e-9)
      fail("regret disagrees with its defining sum", config.horizon);

    // Determinism: the same config and seed reproduce the ledger exactly.
    const ReplicationResult again = run_replication(config, 0);
    if (!(again.ledger == rep.ledger))
      fail("replication is not deterministic", config.horizon);

    ++report.cases;
  }
  return report;
}

}  // namespace cogmab::testing
