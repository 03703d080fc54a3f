#ifndef FLOWAE_COMMON_HPP
#define FLOWAE_COMMON_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowae {

/// Base for every error raised by the library. The CLI maps these to
/// exit code 2 (data error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (CSV rows, bundle files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Format or layout version that this build does not understand.
class VersionError : public Error {
public:
    using Error::Error;
};

/// Violated precondition on an argument (shape, range, empty input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Derive a named sub-seed from a root seed, so each stochastic component
/// (init, shuffle, dropout, sampling, ...) can be reproduced in isolation.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) noexcept
{
    return detail::splitmix64(root ^ detail::splitmix64(detail::fnv1a(name)));
}

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so they are avoided here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0) {
            throw InvalidArgument("Rng::below: empty range");
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()
                                    - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = 0;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo) {
            throw InvalidArgument("Rng::between: hi < lo");
        }
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Fisher-Yates with our own integer draws (std::shuffle is not portable).
    template <typename RandomIt>
    void shuffle(RandomIt first, RandomIt last)
    {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            using std::swap;
            swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace flowae

#endif
