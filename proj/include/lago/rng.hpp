#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

namespace lago {

// Independent purposes drawing from the run seed. The numeric values are part
// of the trace format: changing one changes every trace.
enum class StreamPurpose : std::uint64_t {
    Profiles = 1,
    Subsets = 2,
    Tasks = 3,
    Rates = 4,
    Frequencies = 5,
    Coefficients = 6,
    Exploration = 7,
};

/// SplitMix64 finalizer; used to derive sub-stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// A reproducible random stream. Draws are defined from the raw 64-bit
/// mt19937_64 output only, so a (seed, purpose) pair yields identical values
/// on every standard library.
class RandomStream {
public:
    RandomStream() = default;
    RandomStream(std::uint64_t seed, StreamPurpose purpose);

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01();
    /// Uniform in [low, high]; returns low when low == high.
    double uniform(double low, double high);
    /// Log-uniform in [low, high].
    double log_uniform(double low, double high);
    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);
    /// Poisson draw by inversion; intended for small means.
    std::uint32_t poisson(double mean);

    friend bool operator==(const RandomStream&, const RandomStream&) = default;

    // Textual state round trip (the standard mt19937_64 representation).
    [[nodiscard]] std::string save() const;
    void restore(const std::string& state);

private:
    std::mt19937_64 engine_;
};

}  // namespace lago
