// Shared plumbing: error types, warning sink, deterministic RNG, hashing,
// UTF-8 length, round-trip float formatting.
#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scd {

// ---------------------------------------------------------------------------
// Errors. The CLI maps these to exit codes: input/validation problems -> 1,
// numeric failures during training/inference -> 2.
// ---------------------------------------------------------------------------

struct ScdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ScdError {
    using ScdError::ScdError;
};

struct ValidationError : ScdError {
    using ScdError::ScdError;
};

struct ConfigError : ScdError {
    using ScdError::ScdError;
};

struct IoError : ScdError {
    using ScdError::ScdError;
};

struct NumericError : ScdError {
    using ScdError::ScdError;
};

// ---------------------------------------------------------------------------
// Warning sink. Default prints to stderr; the CLI's --quiet and tests that
// count warnings install their own handler.
// ---------------------------------------------------------------------------

using WarnHandler = std::function<void(const std::string&)>;

inline WarnHandler& warn_handler() {
    static WarnHandler handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << "\n";
    };
    return handler;
}

inline void set_warn_handler(WarnHandler h) { warn_handler() = std::move(h); }

inline void warn(const std::string& msg) {
    if (warn_handler()) warn_handler()(msg);
}

// ---------------------------------------------------------------------------
// Deterministic RNG. mt19937_64 plus hand-rolled distributions so that a seed
// produces the same stream on every platform (std::normal_distribution and
// friends are implementation-defined).
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53 bits.
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in [0, n), rejection sampled.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw ConfigError("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Poisson draw (Knuth). Large lambdas are split additively so the
    // exp(-lambda) product never underflows.
    std::uint64_t poisson(double lambda) {
        if (!(lambda > 0.0)) return 0;
        std::uint64_t total = 0;
        while (lambda > 30.0) {
            total += poisson_small(30.0);
            lambda -= 30.0;
        }
        return total + poisson_small(lambda);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i + 1));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t poisson_small(double lambda) {
        const double threshold = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > threshold);
        return k - 1;
    }

    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small utilities.
// ---------------------------------------------------------------------------

// Number of Unicode scalar values in a UTF-8 string (continuation bytes are
// not counted). Used for the character-length part of the speech-rate feature.
inline std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Strict full-field double parse; returns false on trailing garbage.
inline bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace scd
