#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cogmab/analysis.hpp"
#include "cogmab/belief.hpp"
#include "cogmab/channel.hpp"
#include "cogmab/ledger.hpp"
#include "cogmab/policies.hpp"
#include "cogmab/rng.hpp"

namespace cogmab {

// A full Monte Carlo experiment: which policy, on which channel set, for how
// long, how often. Everything that affects the results is in here; the
// parallelism width never changes the numbers.
struct ExperimentConfig {
  int users = 1;
  std::vector<double> mu;
  std::int64_t horizon = 1000;
  std::int64_t replications = 1;
  PolicyKind policy = PolicyKind::rho_rand;
  Statistic statistic = Statistic::mean;
  FeedbackMode feedback = FeedbackMode::transmission;
  double threshold_scale = 1.0;
  std::uint64_t seed = 1;
  int parallelism = 0;                     // 0 = pick from hardware
  std::vector<std::int64_t> checkpoints;   // empty = log-spaced grid

  int channels() const { return static_cast<int>(mu.size()); }

  void validate() const {
    ChannelParams probe(mu);  // range and distinctness checks
    if (users < 1 || users > channels())
      throw std::invalid_argument("need 1 <= users U <= channels C");
    if (horizon < channels())
      throw std::invalid_argument("horizon must cover the initialization "
                                  "sweep (slots >= channels)");
    if (replications < 1)
      throw std::invalid_argument("need at least one replication");
    if (threshold_scale <= 0.0)
      throw std::invalid_argument("threshold scale must be positive");
    if (policy == PolicyKind::single && users != 1)
      throw std::invalid_argument("the single-user policy requires U = 1");
    std::int64_t prev = 0;
    for (std::int64_t c : checkpoints) {
      if (c < 1 || c > horizon)
        throw std::invalid_argument("checkpoints must lie in [1, horizon]");
      if (c <= prev)
        throw std::invalid_argument("checkpoints must be strictly increasing");
      prev = c;
    }
  }
};

// Log-spaced slot grid (ratio 1.25, rounded), always ending at the horizon.
inline std::vector<std::int64_t> default_checkpoints(std::int64_t horizon,
                                                     int channels) {
  std::vector<std::int64_t> grid;
  double x = static_cast<double>(std::max<std::int64_t>(channels, 1));
  std::int64_t last = 0;
  while (true) {
    auto slot = static_cast<std::int64_t>(std::llround(x));
    if (slot >= horizon) break;
    if (slot > last) {
      grid.push_back(slot);
      last = slot;
    }
    x *= 1.25;
  }
  grid.push_back(horizon);
  return grid;
}

// Everything recorded from a single replication.
struct ReplicationResult {
  RunLedger ledger;                     // final counters
  std::vector<double> regret_at;        // realized regret at each checkpoint
  std::vector<std::int64_t> best_collisions_at;
  std::vector<std::int64_t> wrong_order_at;
  std::vector<std::int64_t> successes_at;
  std::vector<std::int64_t> uhat_max_at;
  std::vector<int> final_channel;       // last sensed channel per user
  int final_uhat_min = 1;
  int final_uhat_max = 1;
  std::int64_t clamp_events = 0;
  std::int64_t slots_to_orthogonality = -1;  // -1: never reached

  explicit ReplicationResult(int users, int channels)
      : ledger(users, channels),
        final_channel(static_cast<std::size_t>(users), -1) {}
};

// Read-only view of one resolved slot, handed to an observer.
struct SlotView {
  std::int64_t slot = 0;   // 1-based
  bool init_phase = false;
  const SlotOutcome& outcome;
  const std::vector<PolicyState>& states;
  const RunLedger& ledger;
};

struct NullObserver {
  void operator()(const SlotView&) const {}
};

namespace detail {

inline bool choices_injective(const std::vector<int>& choices,
                              std::vector<int>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0);
  for (int c : choices)
    if (++scratch[static_cast<std::size_t>(c)] > 1) return false;
  return true;
}

}  // namespace detail

// Runs one replication: an initialization sweep over the channels followed
// by the per-slot policy loop. All randomness comes from streams derived
// from (seed, replication index, user, purpose).
//
// Initialization: learning policies sense channel k in slot k and nobody
// transmits, so the sweep produces no feedback (collision indicators start
// cleared). The central agent staggers its users across channels instead —
// it assigns channels itself, which is what keeps it collision-free. The
// perfect-knowledge policy has nothing to learn and skips the sweep.
template <typename Observer = NullObserver>
ReplicationResult run_replication(const ExperimentConfig& config,
                                  std::int64_t rep_index,
                                  Observer&& observe = Observer{}) {
  config.validate();
  const int users = config.users;
  const int channels = config.channels();
  const ChannelParams params(config.mu);
  const GroundTruth truth(params, users);
  const bool pooled = config.policy == PolicyKind::centralized;
  const bool perfect = config.policy == PolicyKind::perfect_rho_rand;
  const OraclePolicyParams oracle{params};

  Rng channel_rng(derive_seed(config.seed, static_cast<std::uint64_t>(rep_index),
                              0, StreamPurpose::channel));
  std::vector<Rng> policy_rng;
  policy_rng.reserve(static_cast<std::size_t>(users));
  for (int j = 0; j < users; ++j)
    policy_rng.emplace_back(derive_seed(config.seed,
                                        static_cast<std::uint64_t>(rep_index),
                                        static_cast<std::uint64_t>(j) + 1,
                                        StreamPurpose::policy));

  std::vector<UserBeliefState> beliefs(
      pooled ? 1 : static_cast<std::size_t>(users), UserBeliefState(channels));
  std::vector<PolicyState> states;
  for (int j = 0; j < users; ++j) {
    const int u0 = config.policy == PolicyKind::rho_est ? 1 : users;
    states.emplace_back(config.policy, config.statistic, channels, u0);
  }
  const std::vector<double> thresholds =
      threshold_table(static_cast<double>(config.horizon), channels,
                      config.threshold_scale);

  ReplicationResult result(users, channels);
  const std::vector<std::int64_t> grid =
      config.checkpoints.empty()
          ? default_checkpoints(config.horizon, channels)
          : config.checkpoints;
  std::size_t next_checkpoint = 0;

  std::vector<int> choices(static_cast<std::size_t>(users), 0);
  std::vector<int> scratch(static_cast<std::size_t>(channels), 0);
  std::vector<std::vector<double>> snapshots;
  const std::int64_t init_slots = perfect ? 0 : channels;
  std::int64_t nonorthogonal_main_slots = 0;
  bool orthogonal_seen = false;

  for (std::int64_t slot = 1; slot <= config.horizon; ++slot) {
    const bool init = slot <= init_slots;
    snapshots.clear();

    if (init) {
      const int k = static_cast<int>(slot - 1);
      for (int j = 0; j < users; ++j)
        choices[static_cast<std::size_t>(j)] =
            pooled ? (k + j) % channels : k;
    } else if (pooled) {
      snapshots.push_back(score_vector(beliefs[0], config.statistic));
      const std::vector<int> picks = centralized_step(snapshots[0], users);
      for (int j = 0; j < users; ++j)
        choices[static_cast<std::size_t>(j)] = picks[static_cast<std::size_t>(j)];
    } else {
      for (int j = 0; j < users; ++j) {
        auto& st = states[static_cast<std::size_t>(j)];
        auto& rng = policy_rng[static_cast<std::size_t>(j)];
        if (perfect) {
          snapshots.push_back(params.values());
          choices[static_cast<std::size_t>(j)] =
              perfect_rho_rand_step(oracle, st, users, rng);
          continue;
        }
        snapshots.push_back(
            score_vector(beliefs[static_cast<std::size_t>(j)], config.statistic));
        const auto& scores = snapshots.back();
        switch (config.policy) {
          case PolicyKind::single:
            choices[static_cast<std::size_t>(j)] = single_user_step(scores);
            break;
          case PolicyKind::rho_rand:
            choices[static_cast<std::size_t>(j)] =
                rho_rand_step(scores, st, users, rng);
            break;
          case PolicyKind::rho_est:
            choices[static_cast<std::size_t>(j)] = rho_est_step(scores, st, rng);
            break;
          default:
            throw std::logic_error("unhandled policy kind");
        }
      }
    }

    const std::vector<std::uint8_t> availability = sample_slot(params, channel_rng);
    const SlotOutcome outcome = resolve_slot(choices, availability, !init);

    // Sensing result feeds the beliefs regardless of transmissions.
    for (int j = 0; j < users; ++j) {
      const int c = choices[static_cast<std::size_t>(j)];
      update_belief(beliefs[pooled ? 0 : static_cast<std::size_t>(j)], c,
                    availability[static_cast<std::size_t>(c)] != 0);
    }

    // Feedback reaches the policies only in the main loop.
    if (!init) {
      for (int j = 0; j < users; ++j) {
        auto& st = states[static_cast<std::size_t>(j)];
        const bool collided =
            collision_feedback(outcome, static_cast<std::size_t>(j), config.feedback);
        switch (config.policy) {
          case PolicyKind::rho_rand:
          case PolicyKind::perfect_rho_rand:
            rho_rand_feedback(st, collided);
            break;
          case PolicyKind::rho_est:
            rho_est_feedback(st, snapshots[static_cast<std::size_t>(j)],
                             choices[static_cast<std::size_t>(j)], collided,
                             thresholds);
            break;
          default:
            break;  // single/centralized ignore feedback
        }
      }
      if (!orthogonal_seen) {
        if (detail::choices_injective(choices, scratch))
          orthogonal_seen = true;
        else
          ++nonorthogonal_main_slots;
      }
    }

    update_ledger(result.ledger, outcome, truth, snapshots);
    observe(SlotView{slot, init, outcome, states, result.ledger});

    if (next_checkpoint < grid.size() && slot == grid[next_checkpoint]) {
      result.regret_at.push_back(
          compute_regret(result.ledger, config.mu, users).regret);
      result.best_collisions_at.push_back(result.ledger.best_collisions);
      result.wrong_order_at.push_back(result.ledger.wrong_order_slots);
      std::int64_t succ = 0;
      for (auto s : result.ledger.successes) succ += s;
      result.successes_at.push_back(succ);
      int uh = 0;
      for (const auto& st : states) uh = std::max(uh, st.u_hat);
      result.uhat_max_at.push_back(uh);
      ++next_checkpoint;
    }
  }

  for (int j = 0; j < users; ++j)
    result.final_channel[static_cast<std::size_t>(j)] =
        choices[static_cast<std::size_t>(j)];
  result.final_uhat_min = states[0].u_hat;
  result.final_uhat_max = states[0].u_hat;
  for (const auto& st : states) {
    result.final_uhat_min = std::min(result.final_uhat_min, st.u_hat);
    result.final_uhat_max = std::max(result.final_uhat_max, st.u_hat);
    result.clamp_events += st.clamp_events;
  }
  if (orthogonal_seen)
    result.slots_to_orthogonality = nonorthogonal_main_slots;
  return result;
}

// Mean and standard error across replications, one entry per checkpoint.
struct SeriesStat {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct ExperimentResult {
  std::vector<std::int64_t> checkpoints;
  SeriesStat regret;
  SeriesStat best_collisions;
  SeriesStat wrong_order;
  SeriesStat successes;
  SeriesStat uhat_max;
  std::vector<double> mean_final_sensed;  // users x channels, E[T_{i,j}(n)]
  std::vector<double> se_final_sensed;
  std::vector<double> mean_final_successes;    // per user
  std::vector<double> best_channel_frequency;  // per user, final slot
  double overestimate_fraction = 0.0;          // any u_hat above the true count
  double underestimate_fraction = 0.0;         // some u_hat below the true count
  std::int64_t replications = 0;

  std::size_t at(int user, int channel, int channels) const {
    return static_cast<std::size_t>(user) * static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(channel);
  }
};

namespace detail {

inline void reduce_series(const std::vector<std::vector<double>>& per_rep,
                          SeriesStat& out) {
  if (per_rep.empty()) return;
  const std::size_t points = per_rep.front().size();
  const auto reps = static_cast<double>(per_rep.size());
  out.mean.assign(points, 0.0);
  out.stderr_.assign(points, 0.0);
  for (const auto& series : per_rep)
    for (std::size_t p = 0; p < points; ++p) out.mean[p] += series[p];
  for (std::size_t p = 0; p < points; ++p) out.mean[p] /= reps;
  if (per_rep.size() > 1) {
    for (const auto& series : per_rep)
      for (std::size_t p = 0; p < points; ++p) {
        const double d = series[p] - out.mean[p];
        out.stderr_[p] += d * d;
      }
    for (std::size_t p = 0; p < points; ++p)
      out.stderr_[p] = std::sqrt(out.stderr_[p] / (reps - 1.0) / reps);
  }
}

inline std::vector<double> to_doubles(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace detail

// Runs all replications (possibly across threads) and aggregates. The
// reduction always walks replications in index order, so the output is
// bit-identical for any parallelism width.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<std::optional<ReplicationResult>> runs(reps);

  int width = config.parallelism;
  if (width <= 0) {
    width = static_cast<int>(std::thread::hardware_concurrency());
    if (width < 1) width = 1;
  }
  width = std::min<int>(width, static_cast<int>(reps));

  if (width <= 1) {
    for (std::size_t r = 0; r < reps; ++r)
      runs[r] = run_replication(config, static_cast<std::int64_t>(r));
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    for (int w = 0; w < width; ++w)
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t r = cursor.fetch_add(1);
          if (r >= reps) return;
          runs[r] = run_replication(config, static_cast<std::int64_t>(r));
        }
      });
    for (auto& th : pool) th.join();
  }

  ExperimentResult out;
  out.replications = config.replications;
  out.checkpoints = config.checkpoints.empty()
                        ? default_checkpoints(config.horizon, config.channels())
                        : config.checkpoints;

  std::vector<std::vector<double>> series(reps);
  auto reduce = [&](auto getter, SeriesStat& stat) {
    for (std::size_t r = 0; r < reps; ++r) series[r] = getter(*runs[r]);
    detail::reduce_series(series, stat);
  };
  reduce([](const ReplicationResult& r) { return r.regret_at; }, out.regret);
  reduce([](const ReplicationResult& r) {
    return detail::to_doubles(r.best_collisions_at);
  }, out.best_collisions);
  reduce([](const ReplicationResult& r) {
    return detail::to_doubles(r.wrong_order_at);
  }, out.wrong_order);
  reduce([](const ReplicationResult& r) {
    return detail::to_doubles(r.successes_at);
  }, out.successes);
  reduce([](const ReplicationResult& r) {
    return detail::to_doubles(r.uhat_max_at);
  }, out.uhat_max);

  const int users = config.users;
  const int channels = config.channels();
  const std::size_t cells = static_cast<std::size_t>(users) *
                            static_cast<std::size_t>(channels);
  out.mean_final_sensed.assign(cells, 0.0);
  out.se_final_sensed.assign(cells, 0.0);
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t c = 0; c < cells; ++c)
      out.mean_final_sensed[c] += static_cast<double>(runs[r]->ledger.t[c]);
  for (std::size_t c = 0; c < cells; ++c)
    out.mean_final_sensed[c] /= static_cast<double>(reps);
  if (reps > 1) {
    for (std::size_t r = 0; r < reps; ++r)
      for (std::size_t c = 0; c < cells; ++c) {
        const double d = static_cast<double>(runs[r]->ledger.t[c]) -
                         out.mean_final_sensed[c];
        out.se_final_sensed[c] += d * d;
      }
    for (std::size_t c = 0; c < cells; ++c)
      out.se_final_sensed[c] = std::sqrt(out.se_final_sensed[c] /
                                         static_cast<double>(reps - 1) /
                                         static_cast<double>(reps));
  }

  const int best = rank_channels(config.mu)[0];
  out.best_channel_frequency.assign(static_cast<std::size_t>(users), 0.0);
  out.mean_final_successes.assign(static_cast<std::size_t>(users), 0.0);
  std::int64_t over = 0, under = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    for (int j = 0; j < users; ++j) {
      if (runs[r]->final_channel[static_cast<std::size_t>(j)] == best)
        out.best_channel_frequency[static_cast<std::size_t>(j)] += 1.0;
      out.mean_final_successes[static_cast<std::size_t>(j)] +=
          static_cast<double>(runs[r]->ledger.successes[static_cast<std::size_t>(j)]);
    }
    if (runs[r]->final_uhat_max > users) ++over;
    if (runs[r]->final_uhat_min < users) ++under;
  }
  for (double& s : out.mean_final_successes) s /= static_cast<double>(reps);
  for (double& f : out.best_channel_frequency) f /= static_cast<double>(reps);
  out.overestimate_fraction = static_cast<double>(over) / static_cast<double>(reps);
  out.underestimate_fraction = static_cast<double>(under) / static_cast<double>(reps);
  return out;
}

// --- one-dimensional sweeps ---------------------------------------------------

enum class SweepAxis { users, channels, slots };

struct SweepPoint {
  std::int64_t value = 0;
  std::optional<ExperimentResult> result;
  std::string error;  // set when this point's config was invalid
  std::map<std::string, double> bounds;
};

// Runs the template config once per axis value. A channel sweep keeps the
// leading prefix of the template's availability vector, so every added
// channel is better than the ones already present. A failing point is
// reported in place without discarding the rest.
inline std::vector<SweepPoint> sweep(const ExperimentConfig& base,
                                     SweepAxis axis,
                                     const std::vector<std::int64_t>& values) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::int64_t value : values) {
    SweepPoint point;
    point.value = value;
    ExperimentConfig config = base;
    try {
      switch (axis) {
        case SweepAxis::users:
          config.users = static_cast<int>(value);
          break;
        case SweepAxis::channels: {
          if (value < 1 || value > base.channels())
            throw std::invalid_argument(
                "channel sweep value outside the template's availability vector");
          config.mu.assign(base.mu.begin(), base.mu.begin() + value);
          break;
        }
        case SweepAxis::slots:
          config.horizon = value;
          config.checkpoints.clear();
          break;
      }
      point.result = run_experiment(config);
      point.bounds["lower_centralized_coeff"] =
          asymptotic_lower_bound(config.mu, config.users, Regime::centralized);
      point.bounds["lower_distributed_coeff"] =
          asymptotic_lower_bound(config.mu, config.users, Regime::distributed);
    } catch (const std::exception& e) {
      point.error = std::string(e.what()) + " (at sweep value " +
                    std::to_string(value) + ")";
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace cogmab
