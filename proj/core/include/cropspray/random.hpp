#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace cropspray {

/// One splitmix64 scrambling round; used to derive well-separated substream
/// seeds from a single master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic random stream. Gaussian draws use an explicit Box-Muller
/// transform so sequences do not depend on the standard library's
/// distribution internals, only on mt19937_64.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double gaussian(double mean, double std_dev) { return mean + std_dev * gaussian(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Named substreams derived from one master seed. Each subsystem draws from
/// its own stream, so the draw order of one subsystem never perturbs another.
class RngPool {
public:
    enum class Stream : std::uint64_t {
        kEncoder = 1,
        kGps,
        kImu,
        kPixel,
        kRange,
        kCaster,
        kMisc,
    };
    static constexpr std::size_t kStreamCount = 7;

    explicit RngPool(std::uint64_t master_seed)
        : streams_{RandomStream(substream_seed(master_seed, 1)),
                   RandomStream(substream_seed(master_seed, 2)),
                   RandomStream(substream_seed(master_seed, 3)),
                   RandomStream(substream_seed(master_seed, 4)),
                   RandomStream(substream_seed(master_seed, 5)),
                   RandomStream(substream_seed(master_seed, 6)),
                   RandomStream(substream_seed(master_seed, 7))} {}

    RandomStream& stream(Stream s) {
        return streams_[static_cast<std::uint64_t>(s) - 1];
    }

    static std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag) {
        return splitmix64(master + tag * 0x9e3779b97f4a7c15ull);
    }

private:
    std::array<RandomStream, kStreamCount> streams_;
};

}  // namespace cropspray
