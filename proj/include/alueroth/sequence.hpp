#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alueroth/real.hpp"

namespace alueroth {

enum class sequence_kind { geometric, doubly_exponential, linear, custom };

/// A diverging sequence of natural numbers s_1, s_2, ...  Custom lists
/// shorter than a requested index extend geometrically by repeating the last
/// ratio (a single-entry list extends as a constant); log_s uses the
/// unrounded extension, so deep indices stay usable even where the integer
/// value would overflow.
struct sequence_spec {
    sequence_kind kind = sequence_kind::geometric;
    std::uint64_t base = 2;    // geometric: b^n, doubly exponential: b^(2^n)
    std::uint64_t offset = 0;  // linear: n + offset
    std::vector<std::uint64_t> values{};

    void validate() const
    {
        switch (kind) {
        case sequence_kind::geometric:
        case sequence_kind::doubly_exponential:
            if (base < 2)
                throw std::invalid_argument("sequence: base must be >= 2");
            return;
        case sequence_kind::linear:
            return;
        case sequence_kind::custom:
            if (values.empty())
                throw std::invalid_argument("sequence: custom list must be nonempty");
            for (auto v : values)
                if (v < 1)
                    throw std::invalid_argument("sequence: entries must be >= 1");
            return;
        }
        throw std::invalid_argument("sequence: unknown kind");
    }

    index_t s(index_t n) const
    {
        if (n == 0)
            throw std::domain_error("sequence: index must be >= 1");
        switch (kind) {
        case sequence_kind::geometric:
            return checked_pow(base, n);
        case sequence_kind::doubly_exponential: {
            if (n >= 64)
                throw std::overflow_error("sequence: exponent does not fit");
            return checked_pow(base, index_t(1) << n);
        }
        case sequence_kind::linear: {
            index_t v = n + offset;
            if (v < n)
                throw std::overflow_error("sequence: index overflow");
            return v;
        }
        case sequence_kind::custom: {
            if (n <= values.size())
                return values[n - 1];
            double v = std::exp(log_s(n));
            if (v >= 9.2e18)
                throw std::overflow_error("sequence: extended value does not fit");
            index_t r = static_cast<index_t>(std::llround(v));
            return r < 1 ? 1 : r;
        }
        }
        throw std::logic_error("sequence: unknown kind");
    }

    double log_s(index_t n) const
    {
        if (n == 0)
            throw std::domain_error("sequence: index must be >= 1");
        switch (kind) {
        case sequence_kind::geometric:
            return static_cast<double>(n) * std::log(static_cast<double>(base));
        case sequence_kind::doubly_exponential:
            if (n > 1000)
                throw std::overflow_error("sequence: exponent out of double range");
            return std::ldexp(1.0, static_cast<int>(n)) * std::log(static_cast<double>(base));
        case sequence_kind::linear:
            return std::log(static_cast<double>(n + offset));
        case sequence_kind::custom: {
            if (n <= values.size())
                return std::log(static_cast<double>(values[n - 1]));
            double lr = last_ratio_log();
            return std::log(static_cast<double>(values.back()))
                   + static_cast<double>(n - values.size()) * lr;
        }
        }
        throw std::logic_error("sequence: unknown kind");
    }

    /// limsup of log(s_{n+1}) / log(s_1...s_n), when the family admits a
    /// closed form.
    std::optional<double> analytic_tau() const
    {
        switch (kind) {
        case sequence_kind::geometric:
        case sequence_kind::linear:
            return 0.0;
        case sequence_kind::doubly_exponential:
            return 1.0;
        case sequence_kind::custom:
            return std::nullopt;
        }
        return std::nullopt;
    }

private:
    static index_t checked_pow(index_t b, index_t e)
    {
        index_t r = 1;
        while (e) {
            if ((e & 1) && __builtin_mul_overflow(r, b, &r))
                throw std::overflow_error("sequence: value does not fit in 64 bits");
            e >>= 1;
            if (e && __builtin_mul_overflow(b, b, &b))
                throw std::overflow_error("sequence: value does not fit in 64 bits");
        }
        return r;
    }

    double last_ratio_log() const
    {
        if (values.size() < 2)
            return 0.0;
        double r = static_cast<double>(values.back())
                   / static_cast<double>(values[values.size() - 2]);
        return std::log(std::max(r, 1.0));
    }
};

}  // namespace alueroth
