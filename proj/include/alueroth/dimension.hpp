#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alueroth/constraints.hpp"
#include "alueroth/cylinder.hpp"
#include "alueroth/partition.hpp"
#include "alueroth/sequence.hpp"

namespace alueroth {

struct no_root_error : std::runtime_error {
    double value_at_lo;
    double value_at_hi;
    no_root_error(const std::string& msg, double vlo, double vhi)
        : std::runtime_error(msg), value_at_lo(vlo), value_at_hi(vhi)
    {
    }
};

/// Certified bracket for a level-k cover sum, carried in natural-log space.
/// Finite alphabets give a zero-width bracket (up to rounding); unbounded
/// ones add an integral tail sandwich beyond the summation cutoff.
struct cover_sum_result {
    double log_lo = 0;
    double log_hi = 0;
    bool divergent = false;            // finiteness not certified
    bool certainly_divergent = false;  // even the lower envelope diverges

    double log_mid() const { return (log_lo + log_hi) / 2; }
    double value() const
    {
        return divergent ? std::numeric_limits<double>::infinity() : std::exp(log_mid());
    }
    double value_lo() const { return std::exp(log_lo); }
    double value_hi() const
    {
        return divergent ? std::numeric_limits<double>::infinity() : std::exp(log_hi);
    }
};

namespace detail {

/// Streaming log-sum-exp with compensated accumulation.
class log_sum {
public:
    void add_log(double lt)
    {
        if (std::isinf(lt) && lt < 0)
            return;
        if (lt > peak_) {
            double scale = std::exp(peak_ - lt);
            acc_ *= scale;
            comp_ *= scale;
            peak_ = lt;
        }
        kahan(std::exp(lt - peak_));
    }
    double log_total() const
    {
        return (acc_ + comp_ <= 0) ? -std::numeric_limits<double>::infinity()
                                   : peak_ + std::log(acc_ + comp_);
    }

private:
    void kahan(double v)
    {
        double y = v - comp_;
        double t = acc_ + y;
        comp_ = (t - acc_) - y;
        acc_ = t;
    }
    double peak_ = -std::numeric_limits<double>::infinity();
    double acc_ = 0;
    double comp_ = 0;
};

inline constexpr index_t direct_sum_limit = 50'000'000;

}  // namespace detail

/// Per-level factor of the cover sum: sum of a_l^s over the admissible
/// digits of that level.  Unbounded levels are summed up to a cutoff and
/// finished with the partition's certified tail bounds.
template <class Real>
cover_sum_result cover_level_factor(const constraint_model& model, const partition<Real>& p,
                                    index_t level, double s)
{
    auto range = model.admissible_range(level);
    cover_sum_result out;
    if (range.hi) {
        if (*range.hi - range.lo + 1 > detail::direct_sum_limit)
            throw std::overflow_error("cover_sum: digit range too large for direct summation");
        detail::log_sum acc;
        for (index_t l = range.lo; l <= *range.hi; ++l)
            acc.add_log(s * p.log_atom_d(l));
        out.log_lo = out.log_hi = acc.log_total();
        return out;
    }
    index_t cutoff = std::max<index_t>(1'000'000, 100 * model.threshold());
    detail::log_sum acc;
    for (index_t l = range.lo; l <= cutoff; ++l)
        acc.add_log(s * p.log_atom_d(l));
    double partial = acc.log_total();
    log_tail_bounds tail = p.tail_power_sum_bounds(cutoff, s);
    if (tail.divergent) {
        out.divergent = true;
        out.certainly_divergent = tail.certainly_divergent;
        out.log_lo = partial;
        out.log_hi = std::numeric_limits<double>::infinity();
        return out;
    }
    detail::log_sum lo, hi;
    lo.add_log(partial);
    lo.add_log(tail.lo);
    hi.add_log(partial);
    hi.add_log(tail.hi);
    out.log_lo = lo.log_total();
    out.log_hi = hi.log_total();
    return out;
}

/// Level-k cover sum: sum over admissible k-tuples of lambda(C)^s, which
/// factorises into per-level sums.  The envelope model is summed over its
/// non-monotone superset, so its value is an upper bound for the coupled
/// set.  With `tilde`, each cylinder is replaced by the union of its
/// children from the next level's least digit on, scaling the sum by
/// t_{s_{k+1}}^s.
template <class Real>
cover_sum_result cover_sum(const constraint_model& model, const partition<Real>& p, index_t k,
                           double s, bool tilde = false)
{
    if (!(s > 0) || s > 1)
        throw std::domain_error("cover_sum: exponent must lie in (0, 1]");
    if (k < 1)
        throw std::domain_error("cover_sum: level must be >= 1");
    cover_sum_result total;
    for (index_t level = 1; level <= k; ++level) {
        auto f = cover_level_factor(model, p, level, s);
        total.log_lo += f.log_lo;
        total.log_hi += f.log_hi;
        total.divergent |= f.divergent;
        total.certainly_divergent |= f.certainly_divergent;
    }
    if (tilde) {
        double lt = s * p.log_tail_d(model.admissible_range(k + 1).lo);
        total.log_lo += lt;
        total.log_hi += lt;
    }
    return total;
}

struct sigma_row {
    index_t n;
    double log_prod;  // log(s_1 ... s_n)
    double quotient;  // log_prod / ((1+theta) log_prod + theta log s_{n+1})
    double tau_n;     // log(s_{n+1}) / log_prod
    bool defined;     // false when log_prod is 0
};

/// The liminf quotient report.  `sigma` and `tau` are closed-form limits
/// when the sequence family has them; otherwise they fall back on the
/// finite-horizon proxies (min / max of the quotients over the last quarter
/// of the horizon) and `analytic` is false.  The eps-shifted variants move
/// theta by -eps and +eps respectively.
struct sigma_report {
    double theta = 0;
    double eps = 0;
    index_t horizon = 0;
    double sigma = 0;
    double tau = 0;
    bool analytic = false;
    double sigma_tail = 0;
    double tau_tail = 0;
    double sigma_minus = std::numeric_limits<double>::quiet_NaN();
    double sigma_plus = std::numeric_limits<double>::quiet_NaN();
    std::vector<sigma_row> rows;
};

inline sigma_report sigma_from_sequence(double theta, const sequence_spec& seq, index_t horizon,
                                        double eps = 0.0)
{
    if (horizon < 2)
        throw std::domain_error("sigma_from_sequence: horizon must be >= 2");
    if (theta < 0)
        throw std::domain_error("sigma_from_sequence: theta must be nonnegative");
    if (eps < 0)
        throw std::domain_error("sigma_from_sequence: eps must be nonnegative");
    seq.validate();

    sigma_report rep;
    rep.theta = theta;
    rep.eps = eps;
    rep.horizon = horizon;
    rep.rows.reserve(horizon);

    double log_prod = 0;
    index_t window_from = horizon - std::max<index_t>(horizon / 4, 1) + 1;
    auto quotient = [](double th, double lp, double ls) {
        return lp / ((1 + th) * lp + th * ls);
    };
    double q_min = std::numeric_limits<double>::infinity();
    double q_min_minus = q_min, q_min_plus = q_min;
    double t_max = -std::numeric_limits<double>::infinity();
    for (index_t n = 1; n <= horizon; ++n) {
        log_prod += seq.log_s(n);
        double ls = seq.log_s(n + 1);
        sigma_row row;
        row.n = n;
        row.log_prod = log_prod;
        row.defined = log_prod > 0;
        row.quotient = row.defined ? quotient(theta, log_prod, ls)
                                   : std::numeric_limits<double>::quiet_NaN();
        row.tau_n =
            row.defined ? ls / log_prod : std::numeric_limits<double>::quiet_NaN();
        if (row.defined && n >= window_from) {
            q_min = std::min(q_min, row.quotient);
            t_max = std::max(t_max, row.tau_n);
            if (theta - eps >= 0)
                q_min_minus = std::min(q_min_minus, quotient(theta - eps, log_prod, ls));
            q_min_plus = std::min(q_min_plus, quotient(theta + eps, log_prod, ls));
        }
        rep.rows.push_back(row);
    }
    rep.sigma_tail = q_min;
    rep.tau_tail = t_max;

    auto closed_form = [](double th, double tau) { return 1.0 / ((1 + th) + th * tau); };
    std::optional<double> tau_star = seq.analytic_tau();
    if (theta == 0) {
        // the quotient is identically 1 whatever the sequence does
        rep.sigma = 1.0;
        rep.analytic = true;
        rep.tau = tau_star ? *tau_star : t_max;
    } else if (tau_star) {
        rep.analytic = true;
        rep.tau = *tau_star;
        rep.sigma = closed_form(theta, *tau_star);
    } else {
        rep.analytic = false;
        rep.tau = t_max;
        rep.sigma = q_min;
    }
    if (eps > 0) {
        if (tau_star) {
            if (theta - eps >= 0)
                rep.sigma_minus = closed_form(theta - eps, *tau_star);
            rep.sigma_plus = closed_form(theta + eps, *tau_star);
        } else {
            if (theta - eps >= 0)
                rep.sigma_minus = q_min_minus;
            rep.sigma_plus = q_min_plus;
        }
    } else {
        rep.sigma_minus = rep.sigma_plus = rep.sigma;
    }
    return rep;
}

struct theory_result {
    double value = 0;
    bool approximate = false;
};

/// Dimension target of the family: 1/(1+theta) for the Good-type and
/// envelope sets, and the sigma quotient limit for strict Jarnik sets.
inline theory_result theoretical_dimension(const constraint_model& model, double theta)
{
    if (theta < 0)
        throw std::domain_error("theoretical_dimension: theta must be nonnegative");
    switch (model.kind()) {
    case model_kind::good_set:
    case model_kind::good_band:
    case model_kind::envelope:
        return {1.0 / (1.0 + theta), false};
    case model_kind::jarnik: {
        auto rep = sigma_from_sequence(theta, model.sequence(), 64, 0.0);
        return {rep.sigma, !rep.analytic};
    }
    }
    throw std::logic_error("theoretical_dimension: unknown kind");
}

/// Root of the level-k cover sum in s, found by bisection over the certified
/// brackets.  Comparisons against 1 that the bracket cannot decide resolve
/// toward the lower endpoint and mark the estimate ambiguous.
struct dimension_estimate {
    double s_star = 0;
    double s_lo = 0;
    double s_hi = 0;
    index_t level = 1;
    std::vector<double> level_log_factors;
    bool ambiguous = false;
    std::optional<double> theory;
    bool theory_approximate = false;
};

template <class Real>
dimension_estimate moran_root(const constraint_model& model, const partition<Real>& p,
                              index_t k = 1, double tol = 1e-9)
{
    if (!(tol > 0))
        throw std::domain_error("moran_root: tolerance must be positive");
    struct eval_record {
        double s;
        double log_lo, log_hi;
    };
    std::vector<eval_record> history;
    bool ambiguous = false;
    auto eval = [&](double s) {
        auto r = cover_sum(model, p, k, s);
        history.push_back(
            {s, r.log_lo, r.divergent ? std::numeric_limits<double>::infinity() : r.log_hi});
        return r;
    };
    // -1: below 1 certainly, +1: above 1 (or divergent), 0: bracket straddles
    auto classify = [&](const cover_sum_result& r) {
        if (r.divergent)
            return 1;
        if (r.log_hi < 0)
            return -1;
        if (r.log_lo > 0)
            return 1;
        return 0;
    };

    double s_lo = 1e-3, s_hi = 1.0;
    auto at_lo = eval(s_lo);
    auto at_hi = eval(s_hi);
    if (classify(at_lo) <= 0)
        throw no_root_error("moran_root: cover sum never exceeds 1 on the bracket",
                            at_lo.value(), at_hi.value());
    if (classify(at_hi) > 0)
        throw no_root_error("moran_root: cover sum stays above 1 on the bracket",
                            at_lo.value(), at_hi.value());

    while (s_hi - s_lo > tol) {
        double mid = 0.5 * (s_lo + s_hi);
        int c = classify(eval(mid));
        if (c > 0) {
            s_lo = mid;
        } else {
            if (c == 0)
                ambiguous = true;
            s_hi = mid;
        }
    }

    // the cover sum must decrease strictly in s wherever the brackets can
    // tell the values apart
    std::sort(history.begin(), history.end(),
              [](const eval_record& a, const eval_record& b) { return a.s < b.s; });
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i].log_lo > history[i - 1].log_hi + 1e-9)
            throw std::logic_error("moran_root: cover sum is not decreasing in s");

    dimension_estimate est;
    est.s_star = 0.5 * (s_lo + s_hi);
    est.s_lo = s_lo;
    est.s_hi = s_hi;
    est.level = k;
    est.ambiguous = ambiguous;
    for (index_t level = 1; level <= k; ++level)
        est.level_log_factors.push_back(
            cover_level_factor(model, p, level, est.s_star).log_mid());
    auto theory = theoretical_dimension(model, p.theta());
    est.theory = theory.value;
    est.theory_approximate = theory.approximate;
    return est;
}

enum class measure_kind {
    nu,                // 1/(S^k l_1...l_k) on bands, 1/(S_1..S_k l_1..l_k) on envelopes
    digit_reciprocal,  // 1/(l_1...l_k) on jarnik models
};

/// Mass carried by the cylinder of an admissible digit prefix.
template <class Real>
Real frostman_measure(const constraint_model& model, std::span<const index_t> digits)
{
    if (!model.contains(digits))
        throw std::domain_error("frostman_measure: digits lie outside the model");
    switch (model.kind()) {
    case model_kind::good_band: {
        Real s = model.band_mass<Real>();
        Real r(1);
        for (index_t d : digits)
            r /= s * Real(d);
        return r;
    }
    case model_kind::envelope: {
        Real r(1);
        for (std::size_t i = 0; i < digits.size(); ++i)
            r /= model.envelope_level_mass<Real>(i + 1) * Real(digits[i]);
        return r;
    }
    case model_kind::jarnik: {
        Real r(1);
        for (index_t d : digits)
            r /= Real(d);
        return r;
    }
    case model_kind::good_set:
        throw std::domain_error("frostman_measure: no mass distribution on unbounded digit sets");
    }
    throw std::logic_error("frostman_measure: unknown kind");
}

template <class Real>
Real frostman_measure(const constraint_model& model, const digit_sequence& d)
{
    return frostman_measure<Real>(model, std::span<const index_t>(d.digits));
}

/// Smallest observed scaling exponent log mu(B(x, r)) / log r over sampled
/// points, where r is the diameter of the deepest sampled cylinder around x
/// and mu is summed over the (at most three) same-parent cylinders of that
/// level meeting the ball.  Coarser radii sit an O(1/k) constant below the
/// scaling exponent (the neighbour sum and the mass normaliser enter
/// additively), which is exactly the constant the mass-distribution
/// principle discards, so the estimator reads the finest scale.
template <class Real>
double empirical_holder(const constraint_model& model, const partition<Real>& p,
                        measure_kind kind, std::size_t n_samples, std::size_t depth,
                        std::uint64_t seed)
{
    if (depth < 2)
        throw std::domain_error("empirical_holder: depth must be >= 2");
    bool nu_ok = model.kind() == model_kind::good_band || model.kind() == model_kind::envelope;
    if (kind == measure_kind::nu ? !nu_ok : model.kind() != model_kind::jarnik)
        throw std::domain_error("empirical_holder: measure kind does not match the model");

    // log of the per-level mass normaliser, cached across samples
    std::vector<double> log_mass(depth + 1, 0.0);
    if (model.kind() == model_kind::good_band) {
        double ls = std::log(to_double(model.band_mass<real128>()));
        for (std::size_t k = 1; k <= depth; ++k)
            log_mass[k] = ls;
    } else if (model.kind() == model_kind::envelope) {
        for (std::size_t k = 1; k <= depth; ++k)
            log_mass[k] = std::log(to_double(model.envelope_level_mass<real128>(k)));
    }
    auto log_level_factor = [&](index_t level, index_t d) {
        return -log_mass[level] - std::log(static_cast<double>(d));
    };

    double min_exponent = std::numeric_limits<double>::infinity();
    std::uint64_t state = seed;
    std::vector<index_t> neighbour;
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto digits = model.sample(depth, detail::splitmix64(state));
        Real x = decode(p, digits);

        std::vector<double> log_nu_prefix(depth + 1, 0.0);
        std::vector<double> log_lam_prefix(depth + 1, 0.0);
        std::vector<Real> lam_prefix(depth + 1, Real(1));
        for (std::size_t k = 1; k <= depth; ++k) {
            index_t d = digits.digits[k - 1];
            log_nu_prefix[k] = log_nu_prefix[k - 1] + log_level_factor(k, d);
            log_lam_prefix[k] = log_lam_prefix[k - 1] + p.log_atom_d(d);
            lam_prefix[k] = lam_prefix[k - 1] * p.atom(d);
        }

        std::size_t k = depth;
        Real r = lam_prefix[k];
        Real ball_lo = x - r;
        if (ball_lo < 0)
            ball_lo = Real(0);
        Real ball_hi = x + r;
        if (ball_hi > 1)
            ball_hi = Real(1);

        index_t last = digits.digits[k - 1];
        auto range = model.admissible_range(k);
        detail::log_sum mu;
        neighbour.assign(digits.digits.begin(), digits.digits.begin() + k);
        for (int dd = -1; dd <= 1; ++dd) {
            index_t m = last + static_cast<index_t>(dd);
            if (dd < 0 && last == 1)
                continue;
            if (m < range.lo || (range.hi && m > *range.hi))
                continue;
            if (model.monotone_coupling() && k >= 2 && m < digits.digits[k - 2])
                continue;
            if (dd == 0) {  // own cylinder always meets the ball
                mu.add_log(log_nu_prefix[k]);
                continue;
            }
            neighbour[k - 1] = m;
            auto c = cylinder_interval(p, std::span<const index_t>(neighbour));
            if (c.hi >= ball_lo && c.lo <= ball_hi)
                mu.add_log(log_nu_prefix[k - 1] + log_level_factor(k, m));
        }
        min_exponent = std::min(min_exponent, mu.log_total() / log_lam_prefix[k]);
    }
    return min_exponent;
}

}  // namespace alueroth
