#include "ncs/loss_channel.hpp"

#include "ncs/errors.hpp"

#include <cmath>

namespace ncs {

namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Streams keep the draws of different decisions independent.
constexpr std::uint64_t stream_loss = 1;
constexpr std::uint64_t stream_transition = 2;

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    const std::uint64_t key = mix64(seed + stream * golden);
    const std::uint64_t bits = mix64(key + (counter + 1) * golden);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void LossModel::validate() const {
    switch (kind) {
        case Kind::none:
            break;
        case Kind::bernoulli:
            if (!probability(p_loss)) throw ConfigError("loss.p must lie in [0, 1]");
            break;
        case Kind::gilbert_elliott:
            if (!probability(p_g2b) || !probability(p_b2g) || !probability(loss_in_bad)) {
                throw ConfigError("gilbert-elliott probabilities must lie in [0, 1]");
            }
            break;
        case Kind::trace:
            if (trace.empty()) throw ConfigError("loss trace is empty");
            for (int b : trace) {
                if (b != 0 && b != 1) throw ConfigError("loss trace entries must be 0 or 1");
            }
            break;
    }
}

LossModel LossModel::none() { return {}; }

LossModel LossModel::bernoulli(double p_loss, std::uint64_t seed) {
    LossModel m;
    m.kind = Kind::bernoulli;
    m.p_loss = p_loss;
    m.seed = seed;
    return m;
}

LossModel LossModel::gilbert_elliott(double p_g2b, double p_b2g, double loss_in_bad,
                                     std::uint64_t seed) {
    LossModel m;
    m.kind = Kind::gilbert_elliott;
    m.p_g2b = p_g2b;
    m.p_b2g = p_b2g;
    m.loss_in_bad = loss_in_bad;
    m.seed = seed;
    return m;
}

LossModel LossModel::from_trace(std::vector<int> bits, bool wrap) {
    LossModel m;
    m.kind = Kind::trace;
    m.trace = std::move(bits);
    m.trace_wrap = wrap;
    return m;
}

std::string to_string(LossModel::Kind kind) {
    switch (kind) {
        case LossModel::Kind::none: return "none";
        case LossModel::Kind::bernoulli: return "bernoulli";
        case LossModel::Kind::gilbert_elliott: return "gilbert-elliott";
        case LossModel::Kind::trace: return "trace";
    }
    return "none";
}

LossModel::Kind loss_kind_from_string(const std::string& name) {
    if (name == "none") return LossModel::Kind::none;
    if (name == "bernoulli") return LossModel::Kind::bernoulli;
    if (name == "gilbert-elliott") return LossModel::Kind::gilbert_elliott;
    if (name == "trace") return LossModel::Kind::trace;
    throw ConfigError("unknown loss kind '" + name + "'");
}

LossChannel::LossChannel(LossModel model) : model_(std::move(model)) { model_.validate(); }

void LossChannel::advance_to(long k) {
    if (k < next_) {
        bad_ = false;
        next_ = 0;
    }
    while (next_ < k) {
        const double r = counter_uniform(model_.seed, stream_transition, static_cast<std::uint64_t>(next_));
        bad_ = bad_ ? !(r < model_.p_b2g) : (r < model_.p_g2b);
        ++next_;
    }
}

int LossChannel::sample(long k) {
    if (k < 0) throw Error("loss channel step index must be >= 0");
    const auto uk = static_cast<std::uint64_t>(k);
    switch (model_.kind) {
        case LossModel::Kind::none:
            return 1;
        case LossModel::Kind::bernoulli:
            return counter_uniform(model_.seed, stream_loss, uk) < model_.p_loss ? 0 : 1;
        case LossModel::Kind::gilbert_elliott:
            advance_to(k);
            if (!bad_) return 1;
            return counter_uniform(model_.seed, stream_loss, uk) < model_.loss_in_bad ? 0 : 1;
        case LossModel::Kind::trace: {
            const auto n = model_.trace.size();
            if (uk >= n && !model_.trace_wrap) throw TraceExhausted(uk, n);
            return model_.trace[uk % n];
        }
    }
    return 1;
}

int sample_reception(const LossModel& model, long k) {
    LossChannel channel(model);
    return channel.sample(k);
}

}  // namespace ncs
