#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace langdiv {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives an independent stream seed from a master seed and a stream key.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key) {
    return splitmix64(master ^ splitmix64(key));
}

// Deterministic random stream. mt19937_64 output is pinned by the standard,
// and all derived draws below avoid implementation-defined std distributions,
// so sequences are reproducible across platforms and library versions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // Inclusive integer range.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // 53-bit uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // First k entries of a random permutation of [0, n): a uniform sample of
    // k distinct indices (partial Fisher-Yates).
    std::vector<std::uint32_t> sample_indices(std::uint32_t n, std::uint32_t k);

private:
    std::mt19937_64 engine_;
};

inline std::vector<std::uint32_t> RandomStream::sample_indices(std::uint32_t n,
                                                               std::uint32_t k) {
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint32_t j = 0; j < k && j + 1 < n; ++j) {
        const std::uint64_t pick = j + below(n - j);
        std::swap(idx[j], idx[pick]);
    }
    idx.resize(k);
    return idx;
}

} // namespace langdiv
