#pragma once

#include <cstdint>
#include <deque>
#include <random>

#include "qos/model.hpp"

namespace qos {

using Rng = std::mt19937_64;

// Independent generator for one consumer (a flow, the channel, ...) of a run.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

PacketCount sample_bursty(const BurstySourceSpec& spec, Rng& rng);

// Exact (unbounded) Poisson draw with the given mean.
PacketCount sample_poisson(double lambda, Rng& rng);

inline constexpr double kAimdIncrease = 0.05;
inline constexpr double kAimdInitialRate = 1.0;

// lambda' = max{(lambda + 0.05 * acks) / 2^nacks, 1}
double aimd_step(double lambda, PacketCount acks, PacketCount nacks);

struct Feedback {
  PacketCount acks = 0;
  PacketCount nacks = 0;

  bool operator==(const Feedback&) const = default;
};

// Lossless FIFO delay line: a message pushed at slot t pops at slot t + delay.
class FeedbackChannel {
 public:
  explicit FeedbackChannel(Slot delay = 0) : delay_(delay) {}

  void push(Slot t, PacketCount acks, PacketCount nacks);
  // Everything due at or before t; (0, 0) when nothing is due.
  Feedback pop(Slot t);
  // Sum of messages pushed but not yet popped.
  Feedback in_flight() const;
  void clear() { pending_.clear(); }
  Slot delay() const { return delay_; }

 private:
  struct Message {
    Slot due;
    Feedback counts;
  };
  Slot delay_;
  std::deque<Message> pending_;
};

// Per-flow arrival process. Bursty sources ignore feedback; AIMD sources
// push (served, nacks) every slot and adapt their mean when messages arrive.
class ArrivalSource {
 public:
  ArrivalSource(const SourceSpec& spec, Rng rng, Slot feedback_delay);

  PacketCount draw();
  // Emit this slot's feedback and apply whatever is due now; the updated
  // mean governs the next draw.
  void deliver(Slot t, PacketCount acks, PacketCount nacks);

  bool closed_loop() const { return closed_loop_; }
  double lambda() const { return lambda_; }
  const FeedbackChannel& feedback() const { return channel_; }

 private:
  SourceSpec spec_;
  Rng rng_;
  bool closed_loop_;
  double lambda_ = kAimdInitialRate;
  FeedbackChannel channel_;
};

class ChannelSampler {
 public:
  ChannelSampler(const ChannelModel& model, Rng rng);
  PacketCount next(Slot t);

 private:
  ChannelModel model_;
  Rng rng_;
};

}  // namespace qos
