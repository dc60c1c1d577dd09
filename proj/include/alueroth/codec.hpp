#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "alueroth/partition.hpp"
#include "alueroth/real.hpp"

namespace alueroth {

/// A finite digit string (l_1, ..., l_k).  `terminated` marks expansions
/// that reached 0 exactly (finite expansions); otherwise the digits are a
/// truncation of an infinite expansion.  `trusted` counts the leading digits
/// still covered by the arithmetic precision budget when produced by encode.
struct digit_sequence {
    std::vector<index_t> digits;
    bool terminated = false;
    std::size_t trusted = 0;

    bool operator==(const digit_sequence&) const = default;
};

/// One application of the interval map: x in A_n goes to (t_n - x) / a_n,
/// and 0 stays at 0.
template <class Real>
Real apply_map(const partition<Real>& p, const Real& x)
{
    if (x < 0 || x > 1)
        throw std::domain_error("apply_map: x must lie in [0, 1]");
    if (x == 0)
        return Real(0);
    index_t n = p.locate_atom(x);
    Real y = (p.tail(n) - x) / p.atom(n);
    if (y < 0)
        return Real(0);
    if (y >= 1)
        return Real(1) - pow2_neg<Real>(real_traits<Real>::mantissa_bits);
    return y;
}

inline constexpr std::size_t encode_digit_cap = 10000;

/// Extracts digits by iterating the map: digit k is the atom index of the
/// (k-1)-th iterate.  Stops with terminated = true once an iterate falls
/// within zero_tol of 0.  The default tolerance spends half the mantissa;
/// each digit costs about log2(1/a_l) bits, which is what `trusted` tracks.
template <class Real>
digit_sequence encode(const partition<Real>& p, const Real& x, std::size_t k_max,
                      const Real& zero_tol)
{
    if (!(x > 0) || x > 1)
        throw std::domain_error("encode: x must lie in (0, 1]");
    if (k_max == 0)
        throw std::domain_error("encode: k_max must be >= 1");
    k_max = std::min(k_max, encode_digit_cap);

    digit_sequence out;
    out.digits.reserve(std::min<std::size_t>(k_max, 64));
    double bits_budget = real_traits<Real>::mantissa_bits;
    double bits_lost = 0;
    Real y = x;
    while (out.digits.size() < k_max) {
        if (y <= zero_tol) {
            out.terminated = true;
            break;
        }
        index_t n;
        try {
            n = p.locate_atom(y);
        } catch (const std::overflow_error&) {
            break;  // next digit is beyond the index limit; keep the prefix
        }
        Real a = p.atom(n);
        out.digits.push_back(n);
        if constexpr (!real_traits<Real>::is_exact) {
            bits_lost -= log_approx_d(a) * 1.4426950408889634;
            if (bits_lost < bits_budget - 8)
                out.trusted = out.digits.size();
        } else {
            out.trusted = out.digits.size();
        }
        y = (p.tail(n) - y) / a;
        if (y < 0)
            y = Real(0);
        else if (y >= 1)
            y = Real(1) - pow2_neg<Real>(real_traits<Real>::mantissa_bits);
    }
    if (out.digits.size() == k_max && y <= zero_tol)
        out.terminated = true;
    return out;
}

template <class Real>
digit_sequence encode(const partition<Real>& p, const Real& x, std::size_t k_max)
{
    return encode(p, x, k_max,
                  pow2_neg<Real>(real_traits<Real>::mantissa_bits / 2));
}

/// Alternating series value t_{l_1} - a_{l_1} t_{l_2} + a_{l_1} a_{l_2} t_{l_3} - ...
/// evaluated backwards in Horner form; every partial stays inside (0, 1].
template <class Real>
Real decode(const partition<Real>& p, std::span<const index_t> digits)
{
    if (digits.empty())
        throw std::domain_error("decode: digit sequence must be nonempty");
    for (index_t d : digits)
        if (d == 0)
            throw std::domain_error("decode: digits must be >= 1");
    Real r = p.tail(digits.back());
    for (std::size_t i = digits.size() - 1; i-- > 0;)
        r = p.tail(digits[i]) - p.atom(digits[i]) * r;
    return r;
}

template <class Real>
Real decode(const partition<Real>& p, const digit_sequence& d)
{
    return decode(p, std::span<const index_t>(d.digits));
}

/// Rewrites a trailing [..., l, 1] to [..., l + 1] until the final digit is
/// at least 2; this leaves the decoded value unchanged for every partition
/// because t_l - a_l * t_1 = t_{l+1}.  The one-digit sequence [1] (the
/// expansion of x = 1) has no rewrite and is kept as is.
inline digit_sequence canonicalize(digit_sequence d)
{
    if (!d.terminated)
        throw std::domain_error("canonicalize: only finite expansions have a canonical form");
    while (d.digits.size() >= 2 && d.digits.back() == 1) {
        d.digits.pop_back();
        ++d.digits.back();
    }
    d.trusted = std::min(d.trusted, d.digits.size());
    return d;
}

}  // namespace alueroth
