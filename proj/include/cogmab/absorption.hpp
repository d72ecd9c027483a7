#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogmab/rng.hpp"

namespace cogmab {

// Rank-randomization chain: `users` players each occupy one of `channels`
// slots; every player sharing a slot redraws uniformly at random, players
// alone on their slot stay put. Absorption = an injective configuration.
struct AbsorptionSpec {
  int users = 1;
  int channels = 1;
  std::size_t state_cap = 1'000'000;  // labeled state space channels^users
};

namespace detail {

// Decodes state id -> per-user channel; the state space is channels^users.
inline void decode_state(std::uint64_t id, int users, int channels,
                         std::vector<int>& out) {
  for (int u = 0; u < users; ++u) {
    out[static_cast<std::size_t>(u)] = static_cast<int>(id % static_cast<std::uint64_t>(channels));
    id /= static_cast<std::uint64_t>(channels);
  }
}

inline bool injective(const std::vector<int>& config, std::vector<int>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0);
  for (int c : config) {
    if (++scratch[static_cast<std::size_t>(c)] > 1) return false;
  }
  return true;
}

// Dense Gaussian elimination with partial pivoting; solves A x = b in place.
inline std::vector<double> solve_dense(std::vector<double>& a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0)
      throw std::runtime_error("singular hitting-time system");
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k)
        std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t k = ri + 1; k < n; ++k) s -= a[ri * n + k] * x[k];
    x[ri] = s / a[ri * n + ri];
  }
  return x;
}

}  // namespace detail

// Expected hitting times of the absorbing set, one entry per state id
// (absorbing states get 0). Throws if the labeled state space exceeds the cap.
inline std::vector<double> absorption_hitting_times(const AbsorptionSpec& spec) {
  const int users = spec.users;
  const int channels = spec.channels;
  if (users < 1 || channels < 1)
    throw std::invalid_argument("users and channels must be >= 1");
  if (channels < users)
    throw std::invalid_argument("no absorbing state when channels < users");

  double approx = std::pow(static_cast<double>(channels), users);
  if (approx > static_cast<double>(spec.state_cap))
    throw std::length_error("labeled state space exceeds the configured cap");
  std::uint64_t nstates = 1;
  for (int u = 0; u < users; ++u) nstates *= static_cast<std::uint64_t>(channels);

  std::vector<int> config(static_cast<std::size_t>(users));
  std::vector<int> occupancy(static_cast<std::size_t>(channels));
  std::vector<std::int64_t> transient_index(nstates, -1);
  std::vector<std::uint64_t> transient_states;
  for (std::uint64_t s = 0; s < nstates; ++s) {
    detail::decode_state(s, users, channels, config);
    if (!detail::injective(config, occupancy)) {
      transient_index[s] = static_cast<std::int64_t>(transient_states.size());
      transient_states.push_back(s);
    }
  }

  const std::size_t n = transient_states.size();
  if (n > 20000)
    throw std::length_error(
        "hitting-time system too large for a dense solve (" +
        std::to_string(n) + " transient states)");
  std::vector<double> a(n * n, 0.0);
  std::vector<int> movers;
  std::vector<int> draw;
  for (std::size_t row = 0; row < n; ++row) {
    const std::uint64_t s = transient_states[row];
    detail::decode_state(s, users, channels, config);
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (int c : config) ++occupancy[static_cast<std::size_t>(c)];
    movers.clear();
    for (int u = 0; u < users; ++u)
      if (occupancy[static_cast<std::size_t>(config[static_cast<std::size_t>(u)])] >= 2)
        movers.push_back(u);

    a[row * n + row] += 1.0;
    const double p = std::pow(static_cast<double>(channels),
                              -static_cast<double>(movers.size()));
    // Enumerate all joint redraws of the colliding users.
    draw.assign(movers.size(), 0);
    std::vector<int> successor = config;
    while (true) {
      for (std::size_t m = 0; m < movers.size(); ++m)
        successor[static_cast<std::size_t>(movers[m])] = draw[m];
      std::uint64_t next = 0;
      for (std::size_t u = successor.size(); u-- > 0;)
        next = next * static_cast<std::uint64_t>(channels) +
               static_cast<std::uint64_t>(successor[u]);
      const std::int64_t t = transient_index[next];
      if (t >= 0) a[row * n + static_cast<std::size_t>(t)] -= p;
      // Advance the mixed-radix draw counter.
      std::size_t pos = 0;
      while (pos < draw.size()) {
        if (++draw[pos] < channels) break;
        draw[pos] = 0;
        ++pos;
      }
      if (pos == draw.size()) break;
    }
  }

  std::vector<double> h = detail::solve_dense(a, std::vector<double>(n, 1.0));
  std::vector<double> out(nstates, 0.0);
  for (std::size_t row = 0; row < n; ++row)
    out[transient_states[row]] = h[row];
  return out;
}

// Expected slots to reach a collision-free configuration, from the worst
// starting configuration. Empty result means the chain never absorbs
// (fewer channels than users).
inline std::optional<double> expected_absorption_time(const AbsorptionSpec& spec) {
  if (spec.users < 1 || spec.channels < 1)
    throw std::invalid_argument("users and channels must be >= 1");
  if (spec.channels < spec.users) return std::nullopt;
  if (spec.users == 1) return 0.0;  // every configuration is already injective
  const std::vector<double> h = absorption_hitting_times(spec);
  double worst = 0.0;
  for (double v : h) worst = std::max(worst, v);
  return worst;
}

// Hitting time from the all-on-one-channel start, the configuration the
// rank-randomizing policies begin in.
inline std::optional<double> absorption_time_from_clustered_start(
    const AbsorptionSpec& spec) {
  if (spec.channels < spec.users) return std::nullopt;
  if (spec.users == 1) return 0.0;
  return absorption_hitting_times(spec)[0];
}

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t runs = 0;
};

// Monte Carlo twin of the exact solve: simulates the redraw dynamics from
// the all-on-one-channel start and averages the number of non-injective
// slots until absorption.
inline McEstimate mc_absorption_time(int users, int channels,
                                     std::int64_t runs, std::uint64_t seed) {
  if (channels < users)
    throw std::invalid_argument("chain diverges when channels < users");
  Rng rng(splitmix64(seed ^ 0x5bf03635ULL));
  std::vector<int> config(static_cast<std::size_t>(users));
  std::vector<int> occupancy(static_cast<std::size_t>(channels));
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t r = 0; r < runs; ++r) {
    std::fill(config.begin(), config.end(), 0);
    std::int64_t steps = 0;
    while (true) {
      std::fill(occupancy.begin(), occupancy.end(), 0);
      for (int c : config) ++occupancy[static_cast<std::size_t>(c)];
      bool injective = true;
      for (int c : config)
        if (occupancy[static_cast<std::size_t>(c)] > 1) { injective = false; break; }
      if (injective) break;
      ++steps;
      for (int u = 0; u < users; ++u)
        if (occupancy[static_cast<std::size_t>(config[static_cast<std::size_t>(u)])] >= 2)
          config[static_cast<std::size_t>(u)] =
              static_cast<int>(rng.below(static_cast<std::uint64_t>(channels)));
    }
    const double x = static_cast<double>(steps);
    sum += x;
    sumsq += x * x;
  }
  McEstimate est;
  est.runs = runs;
  est.mean = sum / static_cast<double>(runs);
  if (runs > 1) {
    const double var =
        (sumsq - sum * sum / static_cast<double>(runs)) /
        static_cast<double>(runs - 1);
    est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(runs));
  }
  return est;
}

}  // namespace cogmab
