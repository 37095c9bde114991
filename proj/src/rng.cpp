#include "lago/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lago {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose)
    : engine_(mix64(mix64(seed) ^ static_cast<std::uint64_t>(purpose))) {}

double RandomStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double low, double high) {
    if (low == high) return low;
    const double x = low + (high - low) * uniform01();
    return x > high ? high : x;
}

double RandomStream::log_uniform(double low, double high) {
    if (low == high) return low;
    const double x = std::exp(std::log(low) + (std::log(high) - std::log(low)) * uniform01());
    if (x < low) return low;
    return x > high ? high : x;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below: bound must be positive");
    // Largest multiple of bound that fits; reject the tail.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

std::uint32_t RandomStream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
    const double threshold = std::exp(-mean);
    std::uint32_t k = 0;
    double p = uniform01();
    while (p > threshold) {
        ++k;
        p *= uniform01();
    }
    return k;
}

std::string RandomStream::save() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void RandomStream::restore(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
    if (!is) throw std::invalid_argument("malformed random stream state");
}

}  // namespace lago
