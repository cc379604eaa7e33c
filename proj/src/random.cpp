#include "vodsim/random.hpp"

#include <cmath>

namespace vodsim {

RandomSource::RandomSource(std::uint64_t seed)
    : seed_(seed), engine_(splitmix64(seed)) {}

RandomSource RandomSource::substream(std::string_view label) const {
    return RandomSource(mix_seed(seed_, label_hash(label)));
}

RandomSource RandomSource::substream(std::uint64_t label) const {
    return RandomSource(mix_seed(seed_, label));
}

std::uint64_t RandomSource::next_u64() { return engine_(); }

double RandomSource::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

bool RandomSource::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
}

double RandomSource::exponential(double rate) {
    // 1 - u lies in (0, 1], so the log is finite.
    return -std::log(1.0 - uniform01()) / rate;
}

std::size_t RandomSource::pick_weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    // Only reachable through rounding at the top end.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return 0;
}

} // namespace vodsim
