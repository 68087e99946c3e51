#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace lf {

/// splitmix64 finalizer; the basis of all randomness in the project.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_stream_name(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Counter-based generator: value = f(seed, stream, counter). Draw order does
/// not matter, so parallel and serial generation produce identical streams.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view stream)
        : key_(mix64(seed ^ hash_stream_name(stream))) {}

    std::uint64_t raw(std::uint64_t ctr) const { return mix64(key_ ^ mix64(ctr)); }

    /// Uniform in (0, 1]; never exactly zero so log() is safe.
    double uniform(std::uint64_t ctr) const {
        return (static_cast<double>(raw(ctr) >> 11) + 1.0) * 0x1p-53;
    }

    /// Standard normal via Box-Muller; consumes counters 2*ctr and 2*ctr+1.
    double normal(std::uint64_t ctr) const {
        double u1 = uniform(2 * ctr);
        double u2 = uniform(2 * ctr + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t key_;
};

/// Sequential convenience wrapper over CounterRng for initialization,
/// dropout masks and epoch shuffles.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::string_view stream) : base_(seed, stream) {}

    std::uint64_t raw() { return base_.raw(ctr_++); }
    double uniform() { return base_.uniform(ctr_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return base_.normal(ctr_++); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        // Fisher-Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = raw() % i;
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    CounterRng base_;
    std::uint64_t ctr_ = 0;
};

}  // namespace lf
