#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cogmab/rng.hpp"

namespace cogmab {

// True per-slot availability probabilities of the C channels. Ground truth:
// visible to the environment and the evaluation code, never to a policy.
class ChannelParams {
 public:
  explicit ChannelParams(std::vector<double> mu, bool allow_ties = false)
      : mu_(std::move(mu)) {
    if (mu_.empty()) throw std::invalid_argument("need at least one channel");
    for (double m : mu_) {
      if (!(m > 0.0 && m < 1.0))
        throw std::invalid_argument(
            "channel availability must lie strictly in (0,1), got " +
            std::to_string(m));
    }
    if (!allow_ties) {
      std::vector<double> sorted = mu_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument(
            "channel availabilities must be pairwise distinct "
            "(pass allow_ties to override)");
    }
  }

  int channels() const { return static_cast<int>(mu_.size()); }
  double mu(int channel) const { return mu_[static_cast<std::size_t>(channel)]; }
  const std::vector<double>& values() const { return mu_; }

 private:
  std::vector<double> mu_;
};

// Whether a user's collision indicator is driven by failed transmissions
// (the acknowledgement channel) or by any sensing overlap, regardless of
// primary occupancy. The latter is the idealized feedback used by the
// absorption-time analysis.
enum class FeedbackMode { transmission, sensing_overlap };

// Everything that happened in one slot.
struct SlotOutcome {
  std::vector<std::uint8_t> availability;  // per channel: free of primary?
  std::vector<int> choices;                // per user: sensed channel
  std::vector<std::uint8_t> transmitted;   // per user
  std::vector<std::uint8_t> ack;           // per user: transmission went through
  std::vector<std::uint8_t> collided;      // per user: transmitted but no ack
  std::vector<int> occupants;              // per channel: # users sensing it
};

// One availability draw: entry i is independently true with probability mu[i].
inline std::vector<std::uint8_t> sample_slot(const ChannelParams& params,
                                             Rng& rng) {
  std::vector<std::uint8_t> w(static_cast<std::size_t>(params.channels()));
  for (int i = 0; i < params.channels(); ++i)
    w[static_cast<std::size_t>(i)] = rng.bernoulli(params.mu(i)) ? 1 : 0;
  return w;
}

// Resolves all users' channel picks against one availability draw. A user
// transmits iff its channel is free (and transmission is enabled for this
// slot); a transmission is acknowledged iff it was the only one on that
// channel. No transmission, no feedback.
inline SlotOutcome resolve_slot(const std::vector<int>& choices,
                                const std::vector<std::uint8_t>& availability,
                                bool transmit = true) {
  const int channels = static_cast<int>(availability.size());
  const std::size_t users = choices.size();
  SlotOutcome out;
  out.availability = availability;
  out.choices = choices;
  out.transmitted.assign(users, 0);
  out.ack.assign(users, 0);
  out.collided.assign(users, 0);
  out.occupants.assign(static_cast<std::size_t>(channels), 0);

  for (int c : choices) {
    if (c < 0 || c >= channels)
      throw std::invalid_argument("channel choice out of range: " +
                                  std::to_string(c));
    ++out.occupants[static_cast<std::size_t>(c)];
  }
  for (std::size_t j = 0; j < users; ++j) {
    const int c = choices[j];
    const bool free = availability[static_cast<std::size_t>(c)] != 0;
    const bool tx = transmit && free;
    out.transmitted[j] = tx ? 1 : 0;
    if (tx) {
      // All sensers of a free channel transmit, so the transmitter count on
      // channel c equals its occupant count.
      const bool sole = out.occupants[static_cast<std::size_t>(c)] == 1;
      out.ack[j] = sole ? 1 : 0;
      out.collided[j] = sole ? 0 : 1;
    }
  }
  return out;
}

// Collision indicator delivered to user j under the given feedback mode.
inline bool collision_feedback(const SlotOutcome& outcome, std::size_t user,
                               FeedbackMode mode) {
  if (mode == FeedbackMode::transmission) return outcome.collided[user] != 0;
  return outcome.occupants[static_cast<std::size_t>(outcome.choices[user])] >= 2;
}

}  // namespace cogmab
