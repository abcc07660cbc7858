#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ncs {

/// Reception process for the sensor -> controller link.
///
/// Randomness is counter-based: the uniform draw for step k is a SplitMix64
/// hash of (seed, stream, k), so a sequence depends only on the model
/// parameters and the seed, never on call order or platform.
struct LossModel {
    enum class Kind { none, bernoulli, gilbert_elliott, trace };

    Kind kind = Kind::none;
    double p_loss = 0.0;       ///< bernoulli
    double p_g2b = 0.0;        ///< gilbert-elliott: good -> bad per step
    double p_b2g = 0.0;        ///< gilbert-elliott: bad -> good per step
    double loss_in_bad = 1.0;  ///< gilbert-elliott: loss probability while bad
    std::vector<int> trace;    ///< 1 = received, 0 = lost
    bool trace_wrap = false;
    std::uint64_t seed = 0;

    void validate() const;

    static LossModel none();
    static LossModel bernoulli(double p_loss, std::uint64_t seed);
    static LossModel gilbert_elliott(double p_g2b, double p_b2g, double loss_in_bad,
                                     std::uint64_t seed);
    static LossModel from_trace(std::vector<int> bits, bool wrap);
};

std::string to_string(LossModel::Kind kind);
LossModel::Kind loss_kind_from_string(const std::string& name);

/// Uniform double in [0, 1) for (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Stateful reader of one loss realization. Gilbert-Elliott keeps a hidden
/// channel state, so an instance belongs to a single simulation thread.
class LossChannel {
public:
    explicit LossChannel(LossModel model);

    /// s(t_k): 1 = measurement received, 0 = lost. Queries may come in any
    /// order; a backwards query on Gilbert-Elliott replays from step 0.
    int sample(long k);

    const LossModel& model() const noexcept { return model_; }

private:
    void advance_to(long k);

    LossModel model_;
    bool bad_ = false;  // gilbert-elliott state at step next_
    long next_ = 0;
};

/// Stateless convenience wrapper over a fresh LossChannel.
int sample_reception(const LossModel& model, long k);

}  // namespace ncs
