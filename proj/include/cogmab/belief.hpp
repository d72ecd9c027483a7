#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace cogmab {

// Per-user sensing history, kept as streaming means. Feeding the observation
// stream reproduces the batch mean of the stored 0/1 observations exactly.
struct UserBeliefState {
  std::vector<double> sample_mean;   // per channel, in [0,1]
  std::vector<std::int64_t> count;   // per channel, # slots sensed
  std::int64_t total = 0;            // total observations across channels

  explicit UserBeliefState(int channels)
      : sample_mean(static_cast<std::size_t>(channels), 0.0),
        count(static_cast<std::size_t>(channels), 0) {}

  int channels() const { return static_cast<int>(count.size()); }
};

inline void update_belief(UserBeliefState& state, int channel,
                          bool observed_free) {
  auto i = static_cast<std::size_t>(channel);
  assert(channel >= 0 && channel < state.channels());
  const double x = observed_free ? 1.0 : 0.0;
  state.count[i] += 1;
  state.sample_mean[i] += (x - state.sample_mean[i]) /
                          static_cast<double>(state.count[i]);
  state.total += 1;
}

enum class Statistic { mean, opt };

// Sample mean plus sqrt(2 ln n / T) exploration bonus.
inline double g_mean(const UserBeliefState& state, int channel) {
  auto i = static_cast<std::size_t>(channel);
  assert(state.count[i] >= 1 && state.total >= 1);
  const double bonus = std::sqrt(2.0 * std::log(static_cast<double>(state.total)) /
                                 static_cast<double>(state.count[i]));
  return state.sample_mean[i] + bonus;
}

// Sample mean plus min(sqrt(ln n / 2T), 1); the bonus saturates at 1.
inline double g_opt(const UserBeliefState& state, int channel) {
  auto i = static_cast<std::size_t>(channel);
  assert(state.count[i] >= 1 && state.total >= 1);
  const double bonus = std::sqrt(std::log(static_cast<double>(state.total)) /
                                 (2.0 * static_cast<double>(state.count[i])));
  return state.sample_mean[i] + std::min(bonus, 1.0);
}

inline double g_score(const UserBeliefState& state, int channel,
                      Statistic statistic) {
  return statistic == Statistic::mean ? g_mean(state, channel)
                                      : g_opt(state, channel);
}

inline std::vector<double> score_vector(const UserBeliefState& state,
                                        Statistic statistic) {
  std::vector<double> scores(static_cast<std::size_t>(state.channels()));
  for (int i = 0; i < state.channels(); ++i)
    scores[static_cast<std::size_t>(i)] = g_score(state, i, statistic);
  return scores;
}

// Channels ordered by descending score; ties go to the lower channel index,
// so the ranking is a deterministic function of the scores.
inline std::vector<int> rank_channels(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] >
           scores[static_cast<std::size_t>(b)];
  });
  return order;
}

// True if the ordered top-`top` channels of `scores` coincide with the
// ordered prefix of `truth_order`.
inline bool top_order_matches(const std::vector<double>& scores,
                              const std::vector<int>& truth_order, int top) {
  const std::vector<int> order = rank_channels(scores);
  for (int r = 0; r < top; ++r)
    if (order[static_cast<std::size_t>(r)] !=
        truth_order[static_cast<std::size_t>(r)])
      return false;
  return true;
}

}  // namespace cogmab
