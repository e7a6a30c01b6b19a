#include "qos/arrivals.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace qos {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x51c0u};
  return Rng(seq);
}

PacketCount sample_poisson(double lambda, Rng& rng) {
  assert(lambda > 0.0);
  std::poisson_distribution<PacketCount> dist(lambda);
  return dist(rng);
}

PacketCount sample_bursty(const BurstySourceSpec& spec, Rng& rng) {
  // min(K, nu) with K ~ Poisson(lambda) puts exactly P(K >= nu) on nu.
  const PacketCount k = std::min(sample_poisson(spec.lambda, rng), spec.nu);
  return spec.eta * k;
}

double aimd_step(double lambda, PacketCount acks, PacketCount nacks) {
  const double grown = lambda + kAimdIncrease * static_cast<double>(acks);
  // ldexp underflows gracefully to 0 for very large NACK counts.
  const int halvings =
      static_cast<int>(std::min<PacketCount>(nacks, 1 << 20));
  return std::max(std::ldexp(grown, -halvings), 1.0);
}

void FeedbackChannel::push(Slot t, PacketCount acks, PacketCount nacks) {
  pending_.push_back({t + delay_, {acks, nacks}});
}

Feedback FeedbackChannel::pop(Slot t) {
  Feedback out;
  while (!pending_.empty() && pending_.front().due <= t) {
    out.acks += pending_.front().counts.acks;
    out.nacks += pending_.front().counts.nacks;
    pending_.pop_front();
  }
  return out;
}

Feedback FeedbackChannel::in_flight() const {
  Feedback out;
  for (const auto& m : pending_) {
    out.acks += m.counts.acks;
    out.nacks += m.counts.nacks;
  }
  return out;
}

ArrivalSource::ArrivalSource(const SourceSpec& spec, Rng rng, Slot feedback_delay)
    : spec_(spec),
      rng_(std::move(rng)),
      closed_loop_(std::holds_alternative<AimdSourceSpec>(spec)),
      channel_(feedback_delay) {}

PacketCount ArrivalSource::draw() {
  if (const auto* bursty = std::get_if<BurstySourceSpec>(&spec_)) {
    return sample_bursty(*bursty, rng_);
  }
  return sample_poisson(lambda_, rng_);
}

void ArrivalSource::deliver(Slot t, PacketCount acks, PacketCount nacks) {
  if (!closed_loop_) return;
  channel_.push(t, acks, nacks);
  const Feedback due = channel_.pop(t);
  lambda_ = aimd_step(lambda_, due.acks, due.nacks);
}

ChannelSampler::ChannelSampler(const ChannelModel& model, Rng rng)
    : model_(model), rng_(std::move(rng)) {}

PacketCount ChannelSampler::next(Slot t) {
  switch (model_.kind) {
    case ChannelKind::kConstant:
      return model_.s_max;
    case ChannelKind::kSequence: {
      const auto n = static_cast<Slot>(model_.values.size());
      return model_.values[static_cast<std::size_t>((t - 1) % n)];
    }
    case ChannelKind::kSeededRandom: {
      std::uniform_int_distribution<PacketCount> dist(model_.s_min, model_.s_max);
      return dist(rng_);
    }
  }
  return model_.s_max;
}

}  // namespace qos
