#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cogmab/belief.hpp"
#include "cogmab/channel.hpp"

namespace cogmab {

// Per-run accounting. t/v are users x channels, row-major per user.
// best_collisions tracks non-sole sensing events in the true top-U channels
// (availability does not matter for this counter); wrong_order_slots counts
// slots where some user's ordered top-U estimate differs from the truth.
struct RunLedger {
  int users = 0;
  int channels = 0;
  std::int64_t slot = 0;
  std::vector<std::int64_t> t;          // sensing counts T_{i,j}
  std::vector<std::int64_t> v;          // sole-occupancy counts V_{i,j}
  std::int64_t best_collisions = 0;     // M(n)
  std::int64_t wrong_order_slots = 0;   // T'(n)
  std::vector<std::int64_t> successes;  // acknowledged transmissions per user

  RunLedger(int users_, int channels_)
      : users(users_),
        channels(channels_),
        t(static_cast<std::size_t>(users_) * static_cast<std::size_t>(channels_), 0),
        v(static_cast<std::size_t>(users_) * static_cast<std::size_t>(channels_), 0),
        successes(static_cast<std::size_t>(users_), 0) {}

  std::size_t at(int user, int channel) const {
    return static_cast<std::size_t>(user) * static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(channel);
  }
  std::int64_t sensed(int user, int channel) const { return t[at(user, channel)]; }
  std::int64_t sole(int user, int channel) const { return v[at(user, channel)]; }

  std::int64_t total_sensed(int channel) const {
    std::int64_t s = 0;
    for (int j = 0; j < users; ++j) s += sensed(j, channel);
    return s;
  }
  std::int64_t total_sole(int channel) const {
    std::int64_t s = 0;
    for (int j = 0; j < users; ++j) s += sole(j, channel);
    return s;
  }

  bool operator==(const RunLedger&) const = default;
};

// Ground truth derived from the channel parameters, cached so per-slot
// updates do not re-rank the availability vector.
struct GroundTruth {
  std::vector<double> mu;
  std::vector<int> order;            // channels by descending availability
  std::vector<std::uint8_t> is_best; // membership in the top-U set
  int top = 0;

  GroundTruth(const ChannelParams& params, int users)
      : mu(params.values()), order(rank_channels(mu)), top(users) {
    if (users < 1 || users > params.channels())
      throw std::invalid_argument("need 1 <= users <= channels");
    is_best.assign(mu.size(), 0);
    for (int r = 0; r < users; ++r)
      is_best[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
  }
};

// Folds one slot into the ledger. `score_snapshots` holds the score vector
// each decision was based on (one pooled vector under centralized access);
// an empty list marks slots where scores are not defined yet (the
// initialization sweep) and those count as wrongly ordered.
inline void update_ledger(RunLedger& ledger, const SlotOutcome& outcome,
                          const GroundTruth& truth,
                          const std::vector<std::vector<double>>& score_snapshots) {
  const int users = ledger.users;
  ledger.slot += 1;
  for (int j = 0; j < users; ++j) {
    const int c = outcome.choices[static_cast<std::size_t>(j)];
    ledger.t[ledger.at(j, c)] += 1;
    if (outcome.occupants[static_cast<std::size_t>(c)] == 1)
      ledger.v[ledger.at(j, c)] += 1;
    ledger.successes[static_cast<std::size_t>(j)] +=
        outcome.ack[static_cast<std::size_t>(j)] ? 1 : 0;
  }
  // Incremental form of M(n) = sum over top-U channels of (T_i - V_i): a
  // channel sensed by k >= 2 users this slot gains k to T and nothing to V.
  for (int i = 0; i < ledger.channels; ++i) {
    const int occ = outcome.occupants[static_cast<std::size_t>(i)];
    if (occ >= 2 && truth.is_best[static_cast<std::size_t>(i)])
      ledger.best_collisions += occ;
  }
  bool wrong = score_snapshots.empty();
  for (const auto& scores : score_snapshots) {
    if (!top_order_matches(scores, truth.order, truth.top)) {
      wrong = true;
      break;
    }
  }
  if (wrong) ledger.wrong_order_slots += 1;
}

// Convenience overload matching the one-shot call shape used in tests.
inline void update_ledger(RunLedger& ledger, const SlotOutcome& outcome,
                          const ChannelParams& params, int users,
                          const std::vector<std::vector<double>>& score_snapshots) {
  update_ledger(ledger, outcome, GroundTruth(params, users), score_snapshots);
}

// Recomputes M(n) from the standing counters; the incremental counter must
// agree with this after every slot.
inline std::int64_t best_collisions_from_counts(const RunLedger& ledger,
                                                const GroundTruth& truth) {
  std::int64_t m = 0;
  for (int i = 0; i < ledger.channels; ++i)
    if (truth.is_best[static_cast<std::size_t>(i)])
      m += ledger.total_sensed(i) - ledger.total_sole(i);
  return m;
}

}  // namespace cogmab
