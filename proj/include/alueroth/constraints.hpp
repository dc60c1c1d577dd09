#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "alueroth/codec.hpp"
#include "alueroth/partition.hpp"
#include "alueroth/sequence.hpp"

namespace alueroth {

struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class model_kind { good_set, good_band, envelope, jarnik };

struct digit_range {
    index_t lo;
    std::optional<index_t> hi;  // empty for an unbounded alphabet
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Unbiased uniform draw from [0, n); platform-independent.
inline std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t n)
{
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t u = splitmix64(state);
        if (u >= threshold)
            return u % n;
    }
}

/// Least g >= lo with sum_{i=lo}^{g} 1/i > 1, together with that sum.
/// Near-threshold decisions are re-verified at 128-bit precision.
inline std::pair<index_t, long double> least_harmonic_crossing(index_t lo)
{
    if (lo > 1000000)
        throw std::overflow_error("harmonic crossing: start index too large");
    long double acc = 0.0L, comp = 0.0L;
    index_t i = lo;
    for (;; ++i) {
        long double y = 1.0L / static_cast<long double>(i) - comp;
        long double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        if (acc > 1.0L)
            break;
    }
    if (acc - 1.0L < 1e-14L || (i > lo && 1.0L - (acc - 1.0L / i) < 1e-14L)) {
        real128 exact = 0;  // redo the whole scan at higher precision
        index_t j = lo;
        for (;; ++j) {
            exact += real128(1) / j;
            if (exact > 1)
                return {j, static_cast<long double>(to_double(exact))};
        }
    }
    return {i, acc};
}

}  // namespace detail

/// Per-level digit constraints for the fractal families: all digits above a
/// threshold (good_set, with an optional free prefix and a sampling cap),
/// digits confined to a band (good_band), nondecreasing digits inside slowly
/// widening windows (envelope), or digits tracking a diverging sequence
/// (jarnik).
class constraint_model {
public:
    static constraint_model good_set(index_t n, index_t n0 = 1,
                                     std::optional<index_t> sample_cap = {})
    {
        if (n < 1)
            throw std::invalid_argument("good_set: N must be >= 1");
        if (n0 < 1)
            throw std::invalid_argument("good_set: n0 must be >= 1");
        constraint_model m;
        m.kind_ = model_kind::good_set;
        m.n_ = n;
        m.n0_ = n0;
        m.cap_ = sample_cap;
        if (sample_cap && *sample_cap <= n)
            throw std::invalid_argument("good_set: sampling cap must exceed N");
        return m;
    }

    static constraint_model good_band(index_t n, index_t m)
    {
        if (n < 1 || m < n)
            throw std::invalid_argument("good_band: need 1 <= N <= M");
        constraint_model c;
        c.kind_ = model_kind::good_band;
        c.n_ = n;
        c.m_ = m;
        long double s = 0;
        for (index_t i = n; i <= m && i - n < 10000000; ++i)
            s += 1.0L / i;
        c.band_mass_ = s;
        return c;
    }

    /// The least M with sum_{i=N}^{M} 1/i > 1.
    static constraint_model good_band_minimal(index_t n)
    {
        auto [m, s] = detail::least_harmonic_crossing(n);
        auto c = good_band(n, m);
        c.minimal_ = true;
        return c;
    }

    /// Envelope windows [f(n), g(n)] with f(n) = c + floor(log2(n + 1)) and
    /// g(n) the least integer whose reciprocal sum from f(n) exceeds 1.  The
    /// offset c is chosen (or checked) so that every admissible atom obeys
    /// a_l >= l^-(1 + theta + eps) from f(1) on.
    template <class Real>
    static constraint_model envelope(const partition<Real>& p, double eps,
                                     std::optional<index_t> c = {})
    {
        if (!(eps > 0))
            throw std::invalid_argument("envelope: eps must be positive");
        double power = 1.0 + p.theta() + eps;
        auto admissible_from = [&](index_t start) {
            // the deficit log(a_l) + power*log(l) is eventually increasing
            // for every supported family; check densely at first, then on a
            // geometric ladder
            auto ok = [&](index_t l) {
                return p.log_atom_d(l) + power * std::log(static_cast<double>(l)) >= 0;
            };
            for (index_t l = start; l <= std::min<index_t>(start + 4096, 1000000); ++l)
                if (!ok(l))
                    return false;
            for (index_t l = start + 4096; l <= 1000000; l = l * 2 + 1)
                if (!ok(l))
                    return false;
            return true;
        };
        index_t offset = c.value_or(8);
        if (offset < 8)
            throw std::invalid_argument("envelope: offset must be >= 8");
        if (c) {
            if (!admissible_from(offset + 1))
                throw std::invalid_argument(
                    "envelope: atoms fall below the required power law at this offset");
        } else {
            while (!admissible_from(offset + 1)) {
                offset *= 2;
                if (offset > 1000000)
                    throw std::invalid_argument("envelope: no admissible offset found");
            }
        }
        constraint_model m;
        m.kind_ = model_kind::envelope;
        m.f_offset_ = offset;
        m.eps_ = eps;
        return m;
    }

    /// Envelope variant with an explicit nondecreasing f table (extended by
    /// repeating the last value).  The power-law admissibility of the offset
    /// is not checked here; meant for digit-level experiments.
    static constraint_model envelope_custom_f(std::vector<index_t> f_values, double eps = 0.0)
    {
        if (f_values.empty())
            throw std::invalid_argument("envelope: f table must be nonempty");
        for (std::size_t i = 0; i < f_values.size(); ++i) {
            if (f_values[i] < 1)
                throw std::invalid_argument("envelope: f values must be >= 1");
            if (i > 0 && f_values[i] < f_values[i - 1])
                throw std::invalid_argument("envelope: f must be nondecreasing");
            if (f_values[i] > 1000000)
                throw std::invalid_argument("envelope: f values above 1e6 are unsupported");
        }
        constraint_model m;
        m.kind_ = model_kind::envelope;
        m.f_table_ = std::move(f_values);
        m.eps_ = eps;
        return m;
    }

    static constraint_model jarnik(sequence_spec s, index_t n_factor)
    {
        s.validate();
        if (n_factor <= 3)
            throw std::invalid_argument("jarnik: the digit window factor must exceed 3");
        constraint_model m;
        m.kind_ = model_kind::jarnik;
        m.seq_ = std::move(s);
        m.n_ = n_factor;
        return m;
    }

    model_kind kind() const { return kind_; }
    bool monotone_coupling() const { return kind_ == model_kind::envelope; }

    index_t threshold() const { return n_; }       // good_set N / jarnik factor
    index_t band_top() const { return m_; }        // good_band M
    bool minimal_band() const { return minimal_; }
    index_t free_prefix_end() const { return n0_; }
    std::optional<index_t> sample_cap() const { return cap_; }
    double envelope_eps() const { return eps_; }
    const sequence_spec& sequence() const { return seq_; }
    const std::vector<index_t>& envelope_f_table() const { return f_table_; }
    index_t envelope_f_offset() const { return f_offset_; }

    index_t envelope_f(index_t level) const
    {
        if (!f_table_.empty()) {
            return level <= f_table_.size() ? f_table_[level - 1] : f_table_.back();
        }
        return f_offset_ + std::bit_width(level + 1) - 1;
    }

    index_t envelope_g(index_t level) const
    {
        return detail::least_harmonic_crossing(envelope_f(level)).first;
    }

    digit_range admissible_range(index_t level) const
    {
        if (level < 1)
            throw std::domain_error("admissible_range: level must be >= 1");
        switch (kind_) {
        case model_kind::good_set:
            if (level < n0_)
                return {1, std::nullopt};
            return {n_ + 1, std::nullopt};
        case model_kind::good_band:
            return {n_, m_};
        case model_kind::envelope:
            return {envelope_f(level), envelope_g(level)};
        case model_kind::jarnik: {
            index_t s = seq_.s(level);
            index_t hi;
            if (__builtin_mul_overflow(s, n_, &hi))
                throw std::overflow_error("jarnik: digit window exceeds 64-bit range");
            return {s, hi - 1};
        }
        }
        throw std::logic_error("constraint_model: unknown kind");
    }

    bool contains(std::span<const index_t> digits) const
    {
        if (digits.empty())
            throw std::domain_error("contains: digit sequence must be nonempty");
        for (std::size_t i = 0; i < digits.size(); ++i) {
            auto r = admissible_range(i + 1);
            if (digits[i] < r.lo || (r.hi && digits[i] > *r.hi))
                return false;
            if (monotone_coupling() && i > 0 && digits[i] < digits[i - 1])
                return false;
        }
        return true;
    }

    bool contains(const digit_sequence& d) const
    {
        return contains(std::span<const index_t>(d.digits));
    }

    /// Deterministic in the seed; every returned sequence satisfies
    /// contains().  Unbounded levels need a sampling cap.
    digit_sequence sample(std::size_t depth, std::uint64_t seed) const
    {
        if (depth < 1)
            throw std::domain_error("sample: depth must be >= 1");
        std::uint64_t state = seed ^ 0xa5a5a5a55a5a5a5aULL;
        digit_sequence out;
        out.digits.reserve(depth);
        index_t prev = 0;
        for (std::size_t level = 1; level <= depth; ++level) {
            auto r = admissible_range(level);
            index_t lo = r.lo;
            index_t hi;
            if (r.hi) {
                hi = *r.hi;
            } else if (cap_) {
                hi = *cap_;
            } else {
                throw sampling_error("sample: unbounded digit range needs a cap");
            }
            if (monotone_coupling() && prev > lo)
                lo = prev;
            if (lo > hi)
                throw sampling_error("sample: empty admissible range at level "
                                     + std::to_string(level));
            index_t d = lo + detail::uniform_below(state, hi - lo + 1);
            out.digits.push_back(d);
            prev = d;
        }
        out.trusted = out.digits.size();
        return out;
    }

    /// The reciprocal digit sum S over the band, as the requested real type.
    template <class Real>
    Real band_mass() const
    {
        if (kind_ != model_kind::good_band)
            throw std::domain_error("band_mass: only defined for bands");
        Real s(0);
        for (index_t i = n_; i <= m_; ++i)
            s += Real(1) / Real(i);
        return s;
    }

    /// S_n for an envelope level: the reciprocal sum over [f(n), g(n)].
    template <class Real>
    Real envelope_level_mass(index_t level) const
    {
        if (kind_ != model_kind::envelope)
            throw std::domain_error("envelope_level_mass: only defined for envelopes");
        Real s(0);
        index_t g = envelope_g(level);
        for (index_t i = envelope_f(level); i <= g; ++i)
            s += Real(1) / Real(i);
        return s;
    }

private:
    constraint_model() = default;

    model_kind kind_ = model_kind::good_band;
    index_t n_ = 1;                     // good_set N, band N, jarnik factor
    index_t m_ = 1;                     // band M
    index_t n0_ = 1;                    // good_set free prefix bound
    std::optional<index_t> cap_;        // good_set sampling cap
    bool minimal_ = false;
    double eps_ = 0.0;
    index_t f_offset_ = 8;
    std::vector<index_t> f_table_;
    sequence_spec seq_{};
    long double band_mass_ = 0.0L;
};

}  // namespace alueroth
