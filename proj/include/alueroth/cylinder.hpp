#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "alueroth/codec.hpp"
#include "alueroth/partition.hpp"

namespace alueroth {

/// The closed interval of all points whose expansion starts with `digits`.
/// Its endpoints are the decoded value of the prefix and of the prefix with
/// the last digit incremented; the decoded value itself sits on the right
/// for odd prefix length and on the left for even.
template <class Real>
struct cylinder {
    std::vector<index_t> digits;
    Real lo{};
    Real hi{};
    Real measure{};  // product of the atom lengths

    bool odd() const { return digits.size() % 2 == 1; }
};

template <class Real>
Real cylinder_measure(const partition<Real>& p, std::span<const index_t> digits,
                      std::optional<index_t> tilde_next = {})
{
    if (digits.empty())
        throw std::domain_error("cylinder_measure: digits must be nonempty");
    Real m(1);
    for (index_t d : digits) {
        if (d == 0)
            throw std::domain_error("cylinder_measure: digits must be >= 1");
        m *= p.atom(d);
    }
    if (tilde_next) {
        if (*tilde_next == 0)
            throw std::domain_error("cylinder_measure: tilde digit must be >= 1");
        m *= p.tail(*tilde_next);
    }
    return m;
}

template <class Real>
cylinder<Real> cylinder_interval(const partition<Real>& p, std::span<const index_t> digits)
{
    if (digits.empty())
        throw std::domain_error("cylinder_interval: digits must be nonempty");
    cylinder<Real> c;
    c.digits.assign(digits.begin(), digits.end());
    Real own = decode(p, digits);
    std::vector<index_t> bumped(digits.begin(), digits.end());
    ++bumped.back();
    Real other = decode(p, std::span<const index_t>(bumped));
    if (c.odd()) {
        c.lo = other;
        c.hi = own;
    } else {
        c.lo = own;
        c.hi = other;
    }
    c.measure = cylinder_measure(p, digits);
    return c;
}

/// Whether the ball B(decode(digits), r) stays inside the union of the three
/// level-k cylinders whose last digit differs from l_k by at most one, where
/// `digits` has length k + 1 and r lies in the window
/// lambda(C_{k+1}) <= r < lambda(C_k).  A missing left neighbour (l_k = 1)
/// contributes nothing beyond the parent boundary, which the digit-1 child
/// already touches.  Comparisons carry a slack of 2^-(mantissa - 10).
template <class Real>
bool ball_containment_check(const partition<Real>& p, std::span<const index_t> digits,
                            const Real& r)
{
    if (digits.size() < 2)
        throw std::domain_error("ball_containment_check: need a level k+1 >= 2 prefix");
    for (std::size_t i = 1; i < digits.size(); ++i)
        if (digits[i] < digits[i - 1])
            throw std::domain_error("ball_containment_check: digits must be nondecreasing");
    std::size_t k = digits.size() - 1;
    Real lam_k = cylinder_measure(p, digits.first(k));
    Real lam_k1 = lam_k * p.atom(digits.back());
    if (r < lam_k1 || r >= lam_k)
        throw std::domain_error("ball_containment_check: radius outside the admissible window");

    Real x = decode(p, digits);
    std::vector<index_t> nb(digits.begin(), digits.begin() + k);
    bool have = false;
    Real hull_lo{}, hull_hi{};
    for (int i = -1; i <= 1; ++i) {
        index_t last = digits[k - 1];
        if (i < 0 && last == 1)
            continue;
        nb[k - 1] = last + static_cast<index_t>(i);
        auto c = cylinder_interval(p, std::span<const index_t>(nb));
        if (!have) {
            hull_lo = c.lo;
            hull_hi = c.hi;
            have = true;
        } else {
            if (c.lo < hull_lo)
                hull_lo = c.lo;
            if (c.hi > hull_hi)
                hull_hi = c.hi;
        }
    }
    Real eps = pow2_neg<Real>(real_traits<Real>::mantissa_bits - 10);
    Real ball_lo = x - r;
    if (ball_lo < 0)
        ball_lo = Real(0);
    Real ball_hi = x + r;
    if (ball_hi > 1)
        ball_hi = Real(1);
    return ball_lo >= hull_lo - eps && ball_hi <= hull_hi + eps;
}

}  // namespace alueroth
