#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cogmab/belief.hpp"
#include "cogmab/ledger.hpp"

namespace cogmab {

// KL divergence between Bernoulli(p) and Bernoulli(q), in nats.
// 0*ln(0/q) terms are 0 by convention; q must avoid the boundary.
inline double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("kl_bernoulli: p outside [0,1]");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("kl_bernoulli: q must lie strictly in (0,1)");
  auto term = [](double a, double b) {
    return a == 0.0 ? 0.0 : a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

// Compensated accumulator; keeps short sums of availabilities exact to the
// last bit.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Ideal throughput: slots times the sum of the top-`users` availabilities.
inline double optimal_reward(const std::vector<double>& mu, int users,
                             double slots) {
  if (users < 1 || users > static_cast<int>(mu.size()))
    throw std::invalid_argument("need 1 <= users <= channels");
  const std::vector<int> order = rank_channels(mu);
  KahanSum best;
  for (int r = 0; r < users; ++r)
    best.add(mu[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
  return slots * best.sum;
}

// Realized regret of one run, with the upper-bound split into the time spent
// in the bottom channels and the collision count, both scaled by the best
// availability. On every run: regret <= uworst_term + collision_term.
struct RegretBreakdown {
  double regret = 0.0;
  double uworst_term = 0.0;
  double collision_term = 0.0;
};

inline RegretBreakdown compute_regret(const RunLedger& ledger,
                                      const std::vector<double>& mu,
                                      int users) {
  if (static_cast<int>(mu.size()) != ledger.channels)
    throw std::invalid_argument("mu size does not match ledger");
  const std::vector<int> order = rank_channels(mu);
  RegretBreakdown out;
  double sole_value = 0.0;
  for (int i = 0; i < ledger.channels; ++i)
    sole_value += mu[static_cast<std::size_t>(i)] *
                  static_cast<double>(ledger.total_sole(i));
  out.regret = optimal_reward(mu, users, static_cast<double>(ledger.slot)) -
               sole_value;

  const double mu_best = mu[static_cast<std::size_t>(order[0])];
  std::int64_t worst_time = 0;
  for (int r = users; r < ledger.channels; ++r)
    worst_time += ledger.total_sensed(order[static_cast<std::size_t>(r)]);
  out.uworst_term = mu_best * static_cast<double>(worst_time);
  out.collision_term = mu_best * static_cast<double>(ledger.best_collisions);
  return out;
}

// --- asymptotic lower bounds -------------------------------------------------

enum class Regime { single, centralized, distributed };

// Coefficient of ln(n) in the asymptotic regret lower bound for uniformly
// good policies of the given regime.
inline double asymptotic_lower_bound(const std::vector<double>& mu, int users,
                                     Regime regime) {
  if (regime == Regime::single && users != 1)
    throw std::invalid_argument("single-user regime requires users == 1");
  if (users < 1 || users > static_cast<int>(mu.size()))
    throw std::invalid_argument("need 1 <= users <= channels");
  const std::vector<int> order = rank_channels(mu);
  auto nth = [&](int r) {
    return mu[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
  };
  const double mu_pivot = nth(users - 1);
  double sum = 0.0;
  for (int r = users; r < static_cast<int>(mu.size()); ++r) {
    const double mu_i = nth(r);
    if (regime == Regime::distributed) {
      for (int j = 0; j < users; ++j)
        sum += (mu_pivot - mu_i) / kl_bernoulli(mu_i, nth(j));
    } else {
      sum += (mu_pivot - mu_i) / kl_bernoulli(mu_i, mu_pivot);
    }
  }
  return sum;
}

// --- finite-time upper bounds -------------------------------------------------

enum class BoundKind {
  single_gmean,       // regret of the single-user mean-statistic policy
  centralized_gmean,  // regret of the centralized mean-statistic policy
  uworst_time,        // total expected time all users spend in bottom channels
  wrong_order,        // expected slots with a wrongly ordered top-U estimate
  collisions          // expected collision count in the top-U channels
};

// Evaluated closed-form bound. All logarithms are natural, here and in the
// index statistics, so bound overlays and simulated curves share one base.
// The per-term entries sum to the value exactly.
struct BoundReport {
  BoundKind kind;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> per_term;
};

struct CompositionsBound {
  std::uint64_t compositions = 0;    // ways to split `users` over that many slots
  std::uint64_t collision_bound = 0; // users * (compositions - 1)
};

// binom(2U-1, U) and the derived cap on expected collisions under perfect
// knowledge. Exact integer arithmetic; throws once the count no longer fits.
inline CompositionsBound compositions_bound(int users) {
  if (users < 1) throw std::invalid_argument("users must be >= 1");
  const int n = 2 * users - 1;
  const int k = users;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num)
      throw std::overflow_error("compositions count exceeds 64 bits");
    c = c * num / static_cast<std::uint64_t>(i);
  }
  CompositionsBound out;
  out.compositions = c;
  const std::uint64_t per_user = c - 1;
  if (per_user != 0 &&
      static_cast<std::uint64_t>(users) >
          std::numeric_limits<std::uint64_t>::max() / per_user)
    throw std::overflow_error("collision bound exceeds 64 bits");
  out.collision_bound = static_cast<std::uint64_t>(users) * per_user;
  return out;
}

inline BoundReport finite_time_upper_bound(const std::vector<double>& mu,
                                           int users, double slots,
                                           BoundKind kind) {
  if (slots < 1.0) throw std::invalid_argument("need slots >= 1");
  if (users < 1 || users > static_cast<int>(mu.size()))
    throw std::invalid_argument("need 1 <= users <= channels");
  const int channels = static_cast<int>(mu.size());
  const std::vector<int> order = rank_channels(mu);
  auto nth = [&](int r) {
    return mu[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
  };
  const double logn = std::log(slots);
  const double tail = 1.0 + std::numbers::pi * std::numbers::pi / 3.0;
  auto ucb_visits = [&](double gap) { return 8.0 * logn / (gap * gap) + tail; };

  BoundReport report;
  report.kind = kind;
  auto add = [&](std::string label, double value) {
    report.value += value;
    report.per_term.emplace_back(std::move(label), value);
  };

  switch (kind) {
    case BoundKind::single_gmean: {
      if (users != 1)
        throw std::invalid_argument("single_gmean bound requires users == 1");
      for (int r = 1; r < channels; ++r) {
        const double gap = nth(0) - nth(r);
        add("channel_rank_" + std::to_string(r + 1), gap * ucb_visits(gap));
      }
      break;
    }
    case BoundKind::centralized_gmean: {
      // Triple sum as stated for the pooled policy; the inner user sum has a
      // k-independent summand that cancels the 1/U factor.
      for (int m = 0; m < users; ++m)
        for (int r = users; r < channels; ++r)
          for (int k = 0; k < users; ++k) {
            const double gap = nth(m) - nth(r);
            add("m" + std::to_string(m + 1) + "_rank" + std::to_string(r + 1) +
                    "_k" + std::to_string(k + 1),
                gap / static_cast<double>(users) * ucb_visits(gap));
          }
      break;
    }
    case BoundKind::uworst_time: {
      // Expected slots any one user spends in a bottom channel, summed over
      // all users and all bottom channels.
      for (int r = users; r < channels; ++r) {
        double per_user = 0.0;
        for (int k = 0; k < users; ++k) per_user += ucb_visits(nth(k) - nth(r));
        add("rank_" + std::to_string(r + 1),
            static_cast<double>(users) * per_user);
      }
      break;
    }
    case BoundKind::wrong_order: {
      for (int a = 0; a < users; ++a)
        for (int b = a + 1; b < channels; ++b)
          add("ranks_" + std::to_string(a + 1) + "_" + std::to_string(b + 1),
              static_cast<double>(users) * ucb_visits(nth(a) - nth(b)));
      break;
    }
    case BoundKind::collisions: {
      // Collision cap: users * (absorption bound + 1) * wrong-order bound,
      // with the absorption time capped by the compositions count minus one.
      const BoundReport wrong =
          finite_time_upper_bound(mu, users, slots, BoundKind::wrong_order);
      const double factor =
          static_cast<double>(users) *
          static_cast<double>(compositions_bound(users).compositions);
      add("composite", factor * wrong.value);
      break;
    }
  }
  return report;
}

}  // namespace cogmab
