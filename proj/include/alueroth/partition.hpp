#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alueroth/real.hpp"

namespace alueroth {

enum class partition_kind { classical, power, custom_table };
enum class psi_kind { constant, log_power, reciprocal_log };

/// Slowly-varying correction factor for power-law tails.
struct psi_spec {
    psi_kind kind = psi_kind::constant;
    double c = 1.0;     // constant value (cancels after normalisation)
    double beta = 0.0;  // exponent of (log(n+1))^beta
};

/// Declarative description of a partition of (0,1] into atoms A_n ordered
/// right to left.  Tails follow t_n = psi(n) * n^-theta, normalised so that
/// t_1 = 1; the classical kind is the theta = 1, psi = 1 family with
/// rational-friendly evaluators; custom tables list leading tail values and
/// continue geometrically with the last tail ratio.
struct partition_spec {
    partition_kind kind = partition_kind::classical;
    double theta = 1.0;
    psi_spec psi{};
    std::vector<double> table{};
    int precision_bits = 128;

    static partition_spec classical()
    {
        return partition_spec{};
    }
    static partition_spec power(double theta, psi_spec psi = {})
    {
        partition_spec s;
        s.kind = partition_kind::power;
        s.theta = theta;
        s.psi = psi;
        return s;
    }
    static partition_spec custom(std::vector<double> tails)
    {
        partition_spec s;
        s.kind = partition_kind::custom_table;
        s.theta = 0.0;
        s.table = std::move(tails);
        return s;
    }
};

template <class Real>
struct asymptotic_row {
    index_t n;
    Real drift;       // n * a_n / t_n, tends to theta for power tails
    Real atom_ratio;  // a_n / a_{n+1}
};

/// Certified bounds for log(sum_{l > from} a_l^s), used by cover sums over
/// unbounded digit alphabets.  `divergent` means finiteness could not be
/// certified; `certainly_divergent` means even the lower envelope diverges.
struct log_tail_bounds {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool divergent = false;
    bool certainly_divergent = false;
};

template <class Real>
class partition {
public:
    static constexpr index_t index_limit = 1'000'000'000'000'000'000ULL;

    explicit partition(partition_spec spec) : spec_(std::move(spec))
    {
        validate();
        scan_decreasing_from();
    }

    const partition_spec& spec() const { return spec_; }
    double theta() const { return spec_.kind == partition_kind::classical ? 1.0 : spec_.theta; }
    partition_kind kind() const { return spec_.kind; }

    /// t_n, the Lebesgue measure of the n-th tail; t_1 = 1.
    Real tail(index_t n) const
    {
        if (n == 0)
            throw std::domain_error("partition: tail index must be >= 1");
        switch (spec_.kind) {
        case partition_kind::classical:
            return Real(1) / Real(n);
        case partition_kind::power:
            return power_tail(n);
        case partition_kind::custom_table:
            return table_tail(n);
        }
        throw std::logic_error("partition: unknown kind");
    }

    /// a_n = t_n - t_{n+1}, the length of atom A_n = (t_{n+1}, t_n].
    Real atom(index_t n) const { return tail(n) - tail(n + 1); }

    std::pair<Real, Real> measures(index_t n) const
    {
        if (n == 0)
            throw std::domain_error("partition: index must be >= 1");
        return {tail(n), atom(n)};
    }

    /// The unique n with t_{n+1} < x <= t_n.  Analytic inversion of the tail
    /// formula gives a starting guess; a doubling bracket plus binary search
    /// pins the index without ever scanning linearly from 1.
    index_t locate_atom(const Real& x) const
    {
        if (!(x > 0) || x > 1)
            throw std::domain_error("locate_atom: x must lie in (0, 1]");
        index_t g = std::clamp<index_t>(inversion_guess(x), 1, index_limit);
        index_t lo, hi;  // tail(lo) >= x, tail(hi) < x
        if (tail(g) >= x) {
            lo = g;
            index_t step = 1;
            while (true) {
                if (lo >= index_limit) {
                    if (tail(index_limit + 1) >= x)
                        throw std::overflow_error("locate_atom: index exceeds supported limit");
                    lo = index_limit;
                    hi = index_limit + 1;
                    break;
                }
                index_t cand = (step > index_limit - lo) ? index_limit : lo + step;
                if (tail(cand) >= x) {
                    lo = cand;
                    step *= 2;
                } else {
                    hi = cand;
                    break;
                }
            }
        } else {
            hi = g;
            index_t step = 1;
            lo = (g > 1) ? g - 1 : 1;
            while (tail(lo) < x) {
                hi = lo;
                lo = (lo > step) ? lo - step : 1;
                step *= 2;
            }
        }
        while (hi - lo > 1) {
            index_t mid = lo + (hi - lo) / 2;
            if (tail(mid) >= x)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    /// First index beyond which the scanned atoms decrease strictly.
    index_t decreasing_from() const { return n_dec_; }

    std::vector<asymptotic_row<Real>> asymptotic_report(const std::vector<index_t>& indices) const
    {
        if (indices.empty())
            throw std::domain_error("asymptotic_report: need at least one index");
        std::vector<asymptotic_row<Real>> rows;
        rows.reserve(indices.size());
        for (index_t n : indices) {
            if (n == 0)
                throw std::domain_error("asymptotic_report: indices must be >= 1");
            Real t = tail(n), a = atom(n), a1 = atom(n + 1);
            rows.push_back({n, Real(n) * a / t, a / a1});
        }
        return rows;
    }

    // -- double-precision log-space evaluators ------------------------------
    // Cover sums iterate over millions of atoms; these closed forms stay
    // accurate for indices far beyond the range where the values themselves
    // are representable.

    double log_tail_d(index_t n) const
    {
        double nd = static_cast<double>(n);
        switch (spec_.kind) {
        case partition_kind::classical:
            return -std::log(nd);
        case partition_kind::power:
            switch (spec_.psi.kind) {
            case psi_kind::constant:
                return -spec_.theta * std::log(nd);
            case psi_kind::log_power:
                return spec_.psi.beta * (std::log(std::log(nd + 1)) - std::log(std::log(2.0)))
                       - spec_.theta * std::log(nd);
            case psi_kind::reciprocal_log:
                return std::log(std::log1p(std::exp(1.0)))
                       - std::log(std::log(nd + std::exp(1.0))) - spec_.theta * std::log(nd);
            }
            break;
        case partition_kind::custom_table: {
            std::size_t m = spec_.table.size();
            if (n <= m)
                return std::log(spec_.table[n - 1]);
            return std::log(spec_.table[m - 1])
                   + static_cast<double>(n - m) * std::log(table_ratio_d());
        }
        }
        throw std::logic_error("partition: unknown kind");
    }

    /// log t_{n+1} - log t_n, computed without cancellation.
    double delta_log_tail_d(index_t n) const
    {
        double nd = static_cast<double>(n);
        switch (spec_.kind) {
        case partition_kind::classical:
            return -std::log1p(1.0 / nd);
        case partition_kind::power:
            switch (spec_.psi.kind) {
            case psi_kind::constant:
                return -spec_.theta * std::log1p(1.0 / nd);
            case psi_kind::log_power:
                return spec_.psi.beta * std::log1p(std::log1p(1.0 / (nd + 1)) / std::log(nd + 1))
                       - spec_.theta * std::log1p(1.0 / nd);
            case psi_kind::reciprocal_log: {
                double e = std::exp(1.0);
                return -std::log1p(std::log1p(1.0 / (nd + e)) / std::log(nd + e))
                       - spec_.theta * std::log1p(1.0 / nd);
            }
            }
            break;
        case partition_kind::custom_table: {
            std::size_t m = spec_.table.size();
            if (n + 1 <= m)
                return std::log(spec_.table[n] / spec_.table[n - 1]);
            if (n + 1 == m + 1 && n == m)
                return std::log(table_ratio_d());
            if (n >= m)
                return std::log(table_ratio_d());
            break;
        }
        }
        throw std::logic_error("partition: unknown kind");
    }

    double log_atom_d(index_t n) const
    {
        return log_tail_d(n) + std::log(-std::expm1(delta_log_tail_d(n)));
    }

    /// Certified bounds for log(sum_{l > from} a_l^s), 0 < s <= 1.
    log_tail_bounds tail_power_sum_bounds(index_t from, double s) const
    {
        if (!(s > 0.0) || s > 1.0)
            throw std::domain_error("tail_power_sum_bounds: s must lie in (0, 1]");
        if (from < 2)
            throw std::domain_error("tail_power_sum_bounds: cutoff must be >= 2");
        if (s == 1.0) {  // sum of atoms telescopes to a tail
            log_tail_bounds b;
            b.lo = b.hi = log_tail_d(from + 1);
            return b;
        }
        if (spec_.kind == partition_kind::custom_table)
            return table_tail_bounds(from, s);
        double L = static_cast<double>(from);
        double th = theta();
        // power envelopes A * x^-p for the atom sizes beyond the cutoff
        double log_a_hi, p_hi, log_a_lo, p_lo;
        switch (spec_.kind == partition_kind::classical ? psi_kind::constant : spec_.psi.kind) {
        case psi_kind::constant:
            if (spec_.kind == partition_kind::classical) {
                p_hi = p_lo = 2.0;
                log_a_hi = 0.0;
                log_a_lo = -std::log1p(1.0 / (L + 1));
            } else {
                p_hi = p_lo = 1.0 + th;
                log_a_hi = std::log(th);
                log_a_lo = std::log(th);
            }
            break;
        case psi_kind::log_power: {
            double beta = spec_.psi.beta;
            double log_psi_L = beta * (std::log(std::log(L + 1)) - std::log(std::log(2.0)));
            if (beta >= 0) {
                double dp = beta / std::log(L + 1);
                double d_at_L = th - beta * L / ((L + 1) * std::log(L + 1));
                if (d_at_L <= 0)
                    throw std::domain_error("tail_power_sum_bounds: cutoff too small for this psi");
                p_hi = 1.0 + th - dp;
                log_a_hi = log_psi_L - dp * std::log(L) + std::log(th);
                p_lo = 1.0 + th;
                log_a_lo = log_psi_L + std::log(d_at_L);
            } else {
                double dm = -beta / std::log(L + 1);
                double d_at_L = th - beta * L / ((L + 1) * std::log(L + 1));
                p_hi = 1.0 + th;
                log_a_hi = log_psi_L + std::log(d_at_L);
                p_lo = 1.0 + th + dm;
                log_a_lo = log_psi_L + dm * std::log(L) + std::log(th);
            }
            break;
        }
        case psi_kind::reciprocal_log: {
            double e = std::exp(1.0);
            double log_psi_L = std::log(std::log1p(e)) - std::log(std::log(L + e));
            double delta = 1.0 / std::log(L + e);
            p_hi = 1.0 + th;
            log_a_hi = log_psi_L + std::log(th + delta);
            p_lo = 1.0 + th + delta;
            log_a_lo = (th > 0) ? log_psi_L + delta * std::log(L) + std::log(th)
                                : -std::numeric_limits<double>::infinity();
            break;
        }
        default:
            throw std::logic_error("partition: unknown psi");
        }
        log_tail_bounds b;
        if (s * p_hi <= 1.0) {
            b.divergent = true;
            b.certainly_divergent = std::isfinite(log_a_lo) && s * p_lo <= 1.0;
            return b;
        }
        b.hi = s * log_a_hi + (1.0 - s * p_hi) * std::log(L) - std::log(s * p_hi - 1.0);
        if (std::isfinite(log_a_lo) && s * p_lo > 1.0)
            b.lo = s * log_a_lo + (1.0 - s * p_lo) * std::log(L + 2) - std::log(s * p_lo - 1.0);
        return b;
    }

private:
    partition_spec spec_;
    index_t n_dec_ = 1;
    std::vector<Real> table_real_;
    Real table_ratio_{};

    Real power_tail(index_t n) const
    {
        if constexpr (real_traits<Real>::is_exact) {
            throw std::domain_error("power partitions need a floating-point real type");
        } else {
            using std::exp;
            using std::log;
            using std::pow;
            Real nr(n);
            Real th(spec_.theta);
            switch (spec_.psi.kind) {
            case psi_kind::constant:
                return pow(nr, -th);
            case psi_kind::log_power:
                return pow(log(nr + 1) / log(Real(2)), Real(spec_.psi.beta)) * pow(nr, -th);
            case psi_kind::reciprocal_log: {
                Real e = exp(Real(1));
                return log(Real(1) + e) / log(nr + e) * pow(nr, -th);
            }
            }
            throw std::logic_error("partition: unknown psi");
        }
    }

    Real table_tail(index_t n) const
    {
        std::size_t m = table_real_.size();
        if (n <= m)
            return table_real_[n - 1];
        index_t j = n - m;
        if constexpr (real_traits<Real>::is_exact) {
            if (j > 100000)
                throw std::overflow_error("custom-table tails: rational continuation too deep");
            Real q = table_ratio_, acc(1);
            index_t e = j;
            while (e) {  // exponentiation by squaring
                if (e & 1)
                    acc *= q;
                q *= q;
                e >>= 1;
            }
            return table_real_[m - 1] * acc;
        } else {
            using std::pow;
            return table_real_[m - 1] * pow(table_ratio_, Real(static_cast<double>(j)));
        }
    }

    double table_ratio_d() const { return to_double(table_ratio_); }

    log_tail_bounds table_tail_bounds(index_t from, double s) const
    {
        // beyond the table the atoms are exactly geometric, so the tail sum
        // has a closed form; atoms still inside the table are added directly
        std::size_t m = spec_.table.size();
        double acc = 0.0;
        index_t l = from + 1;
        for (; l + 1 <= m; ++l)
            acc += std::exp(s * log_atom_d(l));
        double lq = std::log(table_ratio_d());
        double log_t_l = log_tail_d(l);
        double log_first_atom = log_t_l + std::log(-std::expm1(lq));
        double geo = std::exp(s * log_first_atom) / -std::expm1(s * lq);
        log_tail_bounds b;
        b.lo = b.hi = std::log(acc + geo);
        return b;
    }

    index_t inversion_guess(const Real& x) const
    {
        if constexpr (real_traits<Real>::is_exact)
            if (spec_.kind == partition_kind::classical)
                return floor_index(Real(1) / x);
        double lx = log_approx_d(x);
        double xd = to_double(x);
        if (!(xd > 0) || !std::isfinite(xd))
            xd = std::exp(std::max(lx, -700.0));
        double ln_limit = std::log(static_cast<double>(index_limit)) + 1;
        double ln_n = 0.0;
        switch (spec_.kind) {
        case partition_kind::classical:
            ln_n = -lx;
            break;
        case partition_kind::power:
            switch (spec_.psi.kind) {
            case psi_kind::constant:
                ln_n = -lx / spec_.theta;
                break;
            case psi_kind::log_power:
                ln_n = -lx / std::max(spec_.theta, 1e-300);
                for (int it = 0; it < 4; ++it) {
                    double n = std::exp(std::min(ln_n, ln_limit));
                    double lpsi = spec_.psi.beta
                                  * (std::log(std::log(n + 1)) - std::log(std::log(2.0)));
                    ln_n = (lpsi - lx) / spec_.theta;
                }
                break;
            case psi_kind::reciprocal_log: {
                double e = std::exp(1.0);
                double c = std::log1p(e);
                if (spec_.theta == 0) {
                    double t = c / std::max(xd, 1e-300);
                    ln_n = (t > ln_limit * 2) ? ln_limit : std::log(std::max(std::exp(t) - e, 1.0));
                } else {
                    ln_n = -lx / spec_.theta;
                    for (int it = 0; it < 4; ++it) {
                        double n = std::exp(std::min(ln_n, ln_limit));
                        double lpsi = std::log(c) - std::log(std::log(n + e));
                        ln_n = (lpsi - lx) / spec_.theta;
                    }
                }
                break;
            }
            }
            break;
        case partition_kind::custom_table: {
            std::size_t m = spec_.table.size();
            if (xd >= spec_.table[m - 1] || xd <= 0) {
                auto it = std::lower_bound(spec_.table.rbegin(), spec_.table.rend(), xd);
                return static_cast<index_t>(spec_.table.rend() - it);
            }
            double j = (std::log(xd) - std::log(spec_.table[m - 1])) / std::log(table_ratio_d());
            ln_n = std::log(static_cast<double>(m) + std::max(j, 0.0));
            break;
        }
        }
        if (ln_n >= ln_limit)
            return index_limit;
        return static_cast<index_t>(std::max(std::exp(ln_n), 1.0));
    }

    void validate()
    {
        switch (spec_.kind) {
        case partition_kind::classical:
            if (spec_.theta != 1.0)
                throw std::invalid_argument("classical partition has theta = 1");
            spec_.psi = psi_spec{};
            return;
        case partition_kind::power: {
            if constexpr (real_traits<Real>::is_exact)
                throw std::domain_error("power partitions need a floating-point real type");
            if (spec_.theta < 0)
                throw std::invalid_argument("partition: theta must be nonnegative");
            if (!(spec_.psi.c > 0))
                throw std::invalid_argument("partition: constant psi must be positive");
            if (spec_.theta == 0 && spec_.psi.kind != psi_kind::reciprocal_log)
                throw std::invalid_argument(
                    "partition: theta = 0 needs decaying psi (reciprocal-log), tails do not vanish");
            if (spec_.psi.kind == psi_kind::log_power && spec_.psi.beta > 0) {
                if (spec_.psi.beta / spec_.theta > 13.0)
                    throw std::invalid_argument(
                        "partition: psi grows too fast relative to theta to validate tails");
                // tails provably decrease once log(n+1) > beta/theta; check
                // every index up to that point
                index_t n_star =
                    static_cast<index_t>(std::exp(spec_.psi.beta / spec_.theta)) + 2;
                for (index_t n = 1; n <= n_star; ++n)
                    if (delta_log_tail_d(n) >= 0)
                        throw std::invalid_argument(
                            "partition: tails are not strictly decreasing");
            }
            return;
        }
        case partition_kind::custom_table: {
            const auto& t = spec_.table;
            if (t.size() < 2)
                throw std::invalid_argument("custom-table partition needs at least two tails");
            if (t.front() != 1.0)
                throw std::invalid_argument("custom-table tails must start at 1");
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!(t[i] > 0))
                    throw std::invalid_argument("custom-table tails must be positive");
                if (i > 0 && !(t[i] < t[i - 1]))
                    throw std::invalid_argument("custom-table tails must be strictly decreasing");
            }
            table_real_.reserve(t.size());
            for (double v : t)
                table_real_.push_back(Real(v));
            table_ratio_ = table_real_.back() / table_real_[table_real_.size() - 2];
            return;
        }
        }
        throw std::invalid_argument("partition: unknown kind");
    }

    void scan_decreasing_from()
    {
        index_t window = 65536;
        if (spec_.kind == partition_kind::custom_table)
            window = spec_.table.size() + 4;
        index_t last_violation = 0;
        double prev = log_atom_d(1);
        for (index_t n = 2; n <= window; ++n) {
            double cur = log_atom_d(n);
            if (cur >= prev)
                last_violation = n;
            prev = cur;
        }
        n_dec_ = std::max<index_t>(last_violation, 1);
    }
};

}  // namespace alueroth
