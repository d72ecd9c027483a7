#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cogmab/belief.hpp"
#include "cogmab/channel.hpp"
#include "cogmab/rng.hpp"

namespace cogmab {

enum class PolicyKind { single, centralized, rho_rand, rho_est, perfect_rho_rand };

// Perfect-knowledge variant: ranks channels by the true availabilities
// instead of learned scores.
struct OraclePolicyParams {
  ChannelParams true_mu;
};

// Mutable per-user policy state. `rank` is the 0-based position this user
// targets in its score ranking; `u_hat` is its running estimate of the user
// count (fixed to the true count outside rho_est); `phi` holds per-channel
// collision counts since the last estimate increment.
struct PolicyState {
  PolicyKind kind = PolicyKind::rho_rand;
  Statistic statistic = Statistic::mean;
  int rank = 0;
  int u_hat = 1;
  std::vector<std::int64_t> phi;
  bool last_collided = false;
  std::int64_t clamp_events = 0;  // times u_hat would have exceeded C

  PolicyState() = default;
  PolicyState(PolicyKind kind_, Statistic statistic_, int channels, int u_hat_)
      : kind(kind_),
        statistic(statistic_),
        u_hat(u_hat_),
        phi(static_cast<std::size_t>(channels), 0) {}
};

// --- estimate-increment thresholds -----------------------------------------

// Threshold the cumulative collision count is tested against before the user
// count estimate is bumped from k to k+1. One collision already rules out
// k = 1, so that threshold is 1; for k > 1 the family scale * ln(n) ln(ln(n))
// grows just faster than ln(n).
inline double make_threshold(double horizon, int k, double scale = 1.0) {
  if (k < 1) throw std::invalid_argument("threshold index must be >= 1");
  if (scale <= 0.0) throw std::invalid_argument("threshold scale must be positive");
  if (k == 1) return 1.0;
  if (horizon < 3.0)
    throw std::invalid_argument("threshold needs horizon >= 3 for k > 1");
  return scale * std::log(horizon) * std::log(std::log(horizon));
}

inline double threshold_star(double horizon, int max_users, double scale = 1.0) {
  double best = 0.0;
  for (int k = 1; k <= max_users; ++k)
    best = std::max(best, make_threshold(horizon, k, scale));
  return best;
}

// xi(n;k) for k = 1..channels, indexed by k-1.
inline std::vector<double> threshold_table(double horizon, int channels,
                                           double scale = 1.0) {
  std::vector<double> xi(static_cast<std::size_t>(channels));
  for (int k = 1; k <= channels; ++k)
    xi[static_cast<std::size_t>(k - 1)] = make_threshold(horizon, k, scale);
  return xi;
}

// --- per-slot channel selection ---------------------------------------------

// Highest-scoring channel.
inline int single_user_step(const std::vector<double>& scores) {
  return rank_channels(scores)[0];
}
inline int single_user_step(const UserBeliefState& belief, Statistic statistic) {
  return single_user_step(score_vector(belief, statistic));
}

// Central agent: the top-`users` channels of the pooled scores, assigned
// injectively (user j takes the j-th best). Collision-free by construction.
inline std::vector<int> centralized_step(const std::vector<double>& scores,
                                         int users) {
  if (users > static_cast<int>(scores.size()))
    throw std::invalid_argument("more users than channels");
  const std::vector<int> order = rank_channels(scores);
  return std::vector<int>(order.begin(), order.begin() + users);
}
inline std::vector<int> centralized_step(const UserBeliefState& pooled,
                                         int users, Statistic statistic) {
  return centralized_step(score_vector(pooled, statistic), users);
}

// Rank-randomizing distributed step: redraw the rank uniformly on
// {0..users-1} only if the previous slot ended in a collision, then target
// the rank-th best channel of the current scores.
inline int rho_rand_step(const std::vector<double>& scores, PolicyState& state,
                         int users, Rng& rng) {
  if (state.last_collided)
    state.rank = static_cast<int>(rng.below(static_cast<std::uint64_t>(users)));
  return rank_channels(scores)[static_cast<std::size_t>(state.rank)];
}
inline int rho_rand_step(const UserBeliefState& belief, PolicyState& state,
                         int users, Statistic statistic, Rng& rng) {
  return rho_rand_step(score_vector(belief, statistic), state, users, rng);
}
inline int perfect_rho_rand_step(const OraclePolicyParams& oracle,
                                 PolicyState& state, int users, Rng& rng) {
  return rho_rand_step(oracle.true_mu.values(), state, users, rng);
}

// Records the slot's collision feedback; the rank is kept on a clean slot.
inline void rho_rand_feedback(PolicyState& state, bool collided) {
  state.last_collided = collided;
}

// Unknown-user-count variant: like rho_rand but randomizes over the current
// estimate u_hat.
inline int rho_est_step(const std::vector<double>& scores, PolicyState& state,
                        Rng& rng) {
  if (state.last_collided)
    state.rank =
        static_cast<int>(rng.below(static_cast<std::uint64_t>(state.u_hat)));
  return rank_channels(scores)[static_cast<std::size_t>(state.rank)];
}
inline int rho_est_step(const UserBeliefState& belief, PolicyState& state,
                        Statistic statistic, Rng& rng) {
  return rho_est_step(score_vector(belief, statistic), state, rng);
}

// Post-slot half of the rho_est step. Accumulates the collision into the
// per-channel counters, then sums the counters over the *current* top-u_hat
// channels; strictly exceeding xi(n;u_hat) bumps the estimate and discards
// the collision history. The rank is not redrawn on a bump: existing ranks
// stay valid because u_hat only grows. Should the estimate already equal the
// channel count it stays there (clamp, recorded as a diagnostic).
inline void rho_est_feedback(PolicyState& state,
                             const std::vector<double>& scores, int chosen,
                             bool collided,
                             const std::vector<double>& thresholds) {
  state.last_collided = collided;
  if (collided) state.phi[static_cast<std::size_t>(chosen)] += 1;

  const std::vector<int> order = rank_channels(scores);
  std::int64_t phi_top = 0;
  for (int r = 0; r < state.u_hat; ++r)
    phi_top += state.phi[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];

  const double xi = thresholds[static_cast<std::size_t>(state.u_hat - 1)];
  if (static_cast<double>(phi_top) > xi) {
    const int channels = static_cast<int>(scores.size());
    if (state.u_hat < channels) {
      state.u_hat += 1;
    } else {
      state.clamp_events += 1;
    }
    std::fill(state.phi.begin(), state.phi.end(), 0);
    // The wipe covers the current slot's indicator too, so the next slot
    // sees a clean history and keeps its rank.
    state.last_collided = false;
  }
}

}  // namespace cogmab
