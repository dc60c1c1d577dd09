#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace alueroth {

namespace mp = boost::multiprecision;

/// Software binary floats with a fixed mantissa width; the library default is
/// the 128-bit type.  All algorithms are templated on the real type, so plain
/// `double`, `long double` and the exact rational type below work as well.
using real128 = mp::number<mp::cpp_bin_float<128, mp::backends::digit_base_2>>;
using real256 = mp::number<mp::cpp_bin_float<256, mp::backends::digit_base_2>>;

/// Exact rational arithmetic; supported by the classical and custom-table
/// partition families (power-law tails need transcendental functions).
using rational = mp::cpp_rational;

/// Digit / atom index.  Closed-form evaluators stay accurate far beyond
/// 32-bit range, so indices are 64-bit throughout.
using index_t = std::uint64_t;

template <class R>
struct real_traits {
    static constexpr bool is_exact = false;
    static constexpr int mantissa_bits = std::numeric_limits<R>::digits;
};

template <>
struct real_traits<rational> {
    static constexpr bool is_exact = true;
    static constexpr int mantissa_bits = 0;
};

/// floor(x) as an index, for x >= 0.
template <class R>
index_t floor_index(const R& x)
{
    if constexpr (real_traits<R>::is_exact) {
        mp::cpp_int q = numerator(x) / denominator(x);
        return q.template convert_to<index_t>();
    } else {
        using std::floor;
        R f = floor(x);
        if (f < 0)
            return 0;
        if (f > R(9.3e18))
            throw std::overflow_error("floor_index: value exceeds 64-bit index range");
        return static_cast<index_t>(f);
    }
}

/// 2^-k as an exact value of R (0 for the rational type, where tolerances
/// are not needed).
template <class R>
R pow2_neg(int k)
{
    if constexpr (real_traits<R>::is_exact) {
        return R(0);
    } else {
        using std::ldexp;
        return ldexp(R(1), -k);
    }
}

template <class R>
double to_double(const R& x)
{
    return static_cast<double>(x);
}

/// Natural log as a double, tolerant of magnitudes outside the double range.
/// Rational inputs use bit lengths, accurate to about one bit.
template <class R>
double log_approx_d(const R& x)
{
    if constexpr (real_traits<R>::is_exact) {
        double bits = static_cast<double>(msb(numerator(x)))
                      - static_cast<double>(msb(denominator(x)));
        return bits * 0.6931471805599453;
    } else {
        double xd = static_cast<double>(x);
        if (xd > 0 && std::isfinite(xd))
            return std::log(xd);
        using std::log;
        return static_cast<double>(log(x));
    }
}

}  // namespace alueroth
