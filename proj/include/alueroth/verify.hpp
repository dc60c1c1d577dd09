#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alueroth/codec.hpp"
#include "alueroth/cylinder.hpp"
#include "alueroth/dimension.hpp"
#include "alueroth/json_io.hpp"

namespace alueroth {

struct suite_result {
    std::string name;
    bool pass = false;
    json details;
};

namespace detail {

inline double unit_open(std::uint64_t& state)  // uniform double in (0, 1]
{
    return 1.0 - static_cast<double>(splitmix64(state) >> 11) * 0x1p-53;
}

}  // namespace detail

/// Round trip at depth 30 on the classical partition: decode(encode(x))
/// must sit within the cylinder diameter of x, and within 1e-6.
inline suite_result verify_roundtrip(std::uint64_t seed = 7, std::size_t n_samples = 10000,
                                     std::size_t depth = 30)
{
    partition<real128> p(partition_spec::classical());
    std::uint64_t state = seed;
    std::size_t violations = 0;
    double worst_err = 0, worst_ratio = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        real128 x(detail::unit_open(state));
        auto d = encode(p, x, depth);
        real128 back = decode(p, d);
        real128 err = x > back ? x - back : back - x;
        real128 diam(1);
        for (index_t l : d.digits)
            diam *= p.atom(l);
        if (err > diam || err > real128(1e-6))
            ++violations;
        worst_err = std::max(worst_err, to_double(err));
        if (diam > 0)
            worst_ratio = std::max(worst_ratio, to_double(err / diam));
    }
    suite_result r;
    r.name = "roundtrip";
    r.pass = violations == 0;
    r.details = {{"samples", n_samples},
                 {"depth", depth},
                 {"seed", seed},
                 {"violations", violations},
                 {"max_error", worst_err},
                 {"max_error_over_diameter", worst_ratio}};
    return r;
}

/// Dropping the first digit of encode(x, depth) must equal
/// encode(apply_map(x), depth - 1) digit for digit.
inline suite_result verify_shift(std::uint64_t seed = 11, std::size_t n_samples = 1000,
                                 std::size_t depth = 20)
{
    partition<real128> p(partition_spec::classical());
    std::uint64_t state = seed;
    std::size_t failures = 0, skipped = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        real128 x(detail::unit_open(state));
        auto full = encode(p, x, depth);
        if (full.digits.size() < depth) {
            ++skipped;  // finite expansion; no shifted comparison exists
            continue;
        }
        auto shifted = encode(p, apply_map(p, x), depth - 1);
        bool same = shifted.digits.size() == depth - 1
                    && std::equal(shifted.digits.begin(), shifted.digits.end(),
                                  full.digits.begin() + 1);
        if (!same)
            ++failures;
    }
    suite_result r;
    r.name = "shift";
    r.pass = failures == 0;
    r.details = {{"samples", n_samples},
                 {"depth", depth},
                 {"seed", seed},
                 {"failures", failures},
                 {"skipped", skipped}};
    return r;
}

/// Three-neighbour ball covering on envelope-sampled monotone digit strings:
/// some level k0 <= k_max must exist from which the check never fails, with
/// radii drawn across the admissible window at each level.
inline suite_result verify_lemma_int(std::uint64_t seed = 5, std::size_t n_strings = 500,
                                     std::size_t k_max = 15)
{
    partition<real128> p(partition_spec::classical());
    auto env = constraint_model::envelope(p, 0.1);
    std::uint64_t state = seed;
    std::vector<std::size_t> failures(k_max + 1, 0);
    real128 just_below_one = real128(1) - pow2_neg<real128>(20);
    for (std::size_t i = 0; i < n_strings; ++i) {
        auto digits = env.sample(k_max + 1, detail::splitmix64(state));
        std::vector<real128> lam(k_max + 2, real128(1));
        for (std::size_t k = 1; k <= k_max + 1; ++k)
            lam[k] = lam[k - 1] * p.atom(digits.digits[k - 1]);
        for (std::size_t k = 2; k <= k_max; ++k) {
            std::span<const index_t> prefix(digits.digits.data(), k + 1);
            real128 radii[3] = {lam[k + 1], sqrt(lam[k + 1] * lam[k]),
                                lam[k] * just_below_one};
            for (const real128& r : radii)
                if (!ball_containment_check(p, prefix, r))
                    ++failures[k];
        }
    }
    std::size_t k0 = 0;
    for (std::size_t k = k_max; k >= 2; --k) {
        if (failures[k] > 0)
            break;
        k0 = k;
    }
    suite_result r;
    r.name = "lemma-int";
    r.pass = k0 != 0 && k0 <= k_max;
    json per_level = json::array();
    for (std::size_t k = 2; k <= k_max; ++k)
        per_level.push_back({{"k", k}, {"failures", failures[k]}});
    r.details = {{"strings", n_strings},
                 {"seed", seed},
                 {"k_max", k_max},
                 {"k0", k0},
                 {"per_level", per_level}};
    return r;
}

/// Mass-distribution suite on the minimal band at N = 10: the measure is a
/// probability on every level, it is dominated by lambda^(1/2.1), and the
/// sampled scaling exponent reaches the Moran root up to 0.05.
inline suite_result verify_frostman(std::uint64_t seed = 17)
{
    partition<real128> p(partition_spec::classical());
    auto band = constraint_model::good_band_minimal(10);
    const index_t lo = band.threshold(), hi = band.band_top();
    const double expo = 1.0 / 2.1;

    real128 s = band.band_mass<real128>();
    double log_s = std::log(to_double(s));
    double worst_norm_gap = 0;
    bool dominated = true;
    // depth-first enumeration of all cylinders up to level 4 with running
    // nu-products (real128) and log-products (double)
    for (int k_top = 1; k_top <= 4; ++k_top) {
        real128 total(0);
        std::vector<index_t> tuple{lo};
        std::vector<real128> nu{real128(1)};
        std::vector<double> log_nu{0.0}, log_lam{0.0};
        while (!tuple.empty()) {
            std::size_t k = tuple.size();
            index_t d = tuple.back();
            if (d > hi) {
                tuple.pop_back();
                nu.resize(k);
                log_nu.resize(k);
                log_lam.resize(k);
                if (!tuple.empty())
                    ++tuple.back();
                continue;
            }
            real128 nu_here = nu[k - 1] / (s * d);
            double log_nu_here = log_nu[k - 1] - log_s - std::log(static_cast<double>(d));
            double log_lam_here = log_lam[k - 1] + p.log_atom_d(d);
            if (log_nu_here > expo * log_lam_here + 1e-12)
                dominated = false;
            if (static_cast<int>(k) == k_top) {
                total += nu_here;
                ++tuple.back();
            } else {
                nu.push_back(nu_here);
                log_nu.push_back(log_nu_here);
                log_lam.push_back(log_lam_here);
                tuple.push_back(lo);
            }
        }
        worst_norm_gap = std::max(worst_norm_gap, std::abs(to_double(total - 1)));
    }

    auto est = moran_root(band, p);
    double holder = empirical_holder(band, p, measure_kind::nu, 1000, 12, seed);

    suite_result r;
    r.name = "frostman";
    bool norm_ok = worst_norm_gap <= 1e-10;
    bool holder_ok = holder >= est.s_star - 0.05;
    r.pass = norm_ok && dominated && holder_ok;
    r.details = {{"band", {{"N", lo}, {"M", hi}}},
                 {"normalization_gap", worst_norm_gap},
                 {"dominated", dominated},
                 {"moran_root", est.s_star},
                 {"empirical_holder", holder},
                 {"seed", seed}};
    return r;
}

/// Tilde cover sums for the geometric Jarnik model squeeze around sigma:
/// above it they collapse, below they blow up; and the doubly exponential
/// sequence lands sigma at 1/3.
inline suite_result verify_jarnik_bracket()
{
    partition<double> p(partition_spec::classical());
    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    const double sigma = 0.5;
    auto above = cover_sum(j, p, 20, sigma + 0.05, true);
    auto below = cover_sum(j, p, 20, sigma - 0.05, true);

    sequence_spec dexp{sequence_kind::doubly_exponential, 2};
    auto rep = sigma_from_sequence(1.0, dexp, 20);

    suite_result r;
    r.name = "jarnik-bracket";
    bool collapse = above.value_hi() < 1e-3;
    bool blowup = below.value_lo() > 1e3;
    bool third = std::abs(rep.sigma - 1.0 / 3) <= 1e-3;
    r.pass = collapse && blowup && third;
    r.details = {{"sum_above", above.value()},
                 {"sum_below", below.value()},
                 {"sigma_doubly_exponential", rep.sigma},
                 {"level", 20}};
    return r;
}

}  // namespace alueroth
