#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "alueroth/dimension.hpp"

using namespace alueroth;

namespace {

std::vector<index_t> vec(std::initializer_list<index_t> d) { return d; }

// independent root oracle for the band (2,4): bisection on
// 6^-s + 12^-s + 20^-s = 1, written without the library's machinery
double band24_root_oracle()
{
    auto f = [](double s) {
        return std::pow(6.0, -s) + std::pow(12.0, -s) + std::pow(20.0, -s) - 1.0;
    };
    double lo = 0.01, hi = 1.0;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("theoretical dimension targets", "[dimension]")
{
    auto gs = constraint_model::good_set(17);
    CHECK(theoretical_dimension(gs, 1.0).value == Catch::Approx(0.5));
    CHECK(theoretical_dimension(gs, 3.0).value == Catch::Approx(0.25));

    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    auto tj = theoretical_dimension(j, 1.0);
    CHECK(tj.value == Catch::Approx(0.5));
    CHECK_FALSE(tj.approximate);

    sequence_spec dexp{sequence_kind::doubly_exponential, 2};
    auto j2 = constraint_model::jarnik(dexp, 4);
    CHECK(theoretical_dimension(j2, 1.0).value == Catch::Approx(1.0 / 3));

    sequence_spec cust{sequence_kind::custom, 0, 0, {2, 4, 8, 16}};
    auto j3 = constraint_model::jarnik(cust, 4);
    CHECK(theoretical_dimension(j3, 1.0).approximate);
}

TEST_CASE("sigma reports", "[dimension]")
{
    sequence_spec geo{sequence_kind::geometric, 2};
    auto rep = sigma_from_sequence(1.0, geo, 50);
    CHECK(std::abs(rep.sigma - 0.5) < 1e-2);
    CHECK(std::abs(rep.tau) < 1e-1);
    CHECK(rep.analytic);
    CHECK(rep.rows.size() == 50);
    // the finite-horizon proxies approach the limits from the right side
    CHECK(rep.sigma_tail < rep.sigma);
    CHECK(rep.sigma_tail > 0.45);
    CHECK(rep.tau_tail < 0.06);

    auto rep0 = sigma_from_sequence(0.0, geo, 50);
    CHECK(rep0.sigma == 1.0);
    sequence_spec cust{sequence_kind::custom, 0, 0, {3, 9, 27, 100}};
    CHECK(sigma_from_sequence(0.0, cust, 30).sigma == 1.0);

    sequence_spec dexp{sequence_kind::doubly_exponential, 2};
    auto rep2 = sigma_from_sequence(1.0, dexp, 20);
    CHECK(std::abs(rep2.sigma - 1.0 / 3) < 1e-3);
    CHECK(std::abs(rep2.sigma_tail - 1.0 / 3) < 1e-3);

    CHECK_THROWS_AS(sigma_from_sequence(1.0, geo, 1), std::domain_error);
    CHECK_THROWS_AS(sigma_from_sequence(-1.0, geo, 10), std::domain_error);
}

TEST_CASE("sigma guards undefined quotients and shifts theta", "[dimension]")
{
    sequence_spec ones{sequence_kind::custom, 0, 0, {1, 1, 2, 4, 8, 16, 32}};
    auto rep = sigma_from_sequence(1.0, ones, 6);
    CHECK_FALSE(rep.rows[0].defined);  // log(s_1) = 0
    CHECK_FALSE(rep.rows[1].defined);
    CHECK(rep.rows[3].defined);

    sequence_spec geo{sequence_kind::geometric, 2};
    auto shifted = sigma_from_sequence(1.0, geo, 50, 0.25);
    CHECK(shifted.sigma_minus == Catch::Approx(1.0 / 1.75));
    CHECK(shifted.sigma_plus == Catch::Approx(1.0 / 2.25));
}

TEST_CASE("cover sums over bands have exact product structure", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    auto b = constraint_model::good_band(2, 4);

    auto r1 = cover_sum(b, p, 1, 1.0);
    CHECK(r1.value() == Catch::Approx(0.3).epsilon(1e-12));  // 1/6 + 1/12 + 1/20
    auto r2 = cover_sum(b, p, 2, 1.0);
    CHECK(r2.value() == Catch::Approx(0.09).epsilon(1e-12));

    for (index_t k : {index_t(5), index_t(17), index_t(30)}) {
        auto rk = cover_sum(b, p, k, 0.7);
        auto r = cover_sum(b, p, 1, 0.7);
        CHECK(rk.log_mid() == Catch::Approx(k * r.log_mid()).epsilon(1e-10));
    }

    CHECK_THROWS_AS(cover_sum(b, p, 1, 0.0), std::domain_error);
    CHECK_THROWS_AS(cover_sum(b, p, 1, 1.5), std::domain_error);
    CHECK_THROWS_AS(cover_sum(b, p, 0, 0.5), std::domain_error);
}

TEST_CASE("cover sums decrease strictly in the exponent", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    sequence_spec geo{sequence_kind::geometric, 2};
    std::vector<constraint_model> models = {constraint_model::good_band(2, 4),
                                            constraint_model::good_band_minimal(10),
                                            constraint_model::jarnik(geo, 4)};
    for (const auto& m : models) {
        double prev = std::numeric_limits<double>::infinity();
        for (double s = 0.2; s <= 1.0; s += 0.1) {
            double cur = cover_sum(m, p, 3, s).log_mid();
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("unbounded cover sums carry certified tails", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    auto gs = constraint_model::good_set(10000);
    auto r = cover_sum(gs, p, 1, 0.6);
    REQUIRE_FALSE(r.divergent);
    CHECK(r.value_hi() < 1.0);  // the contraction behind the upper-bound argument
    CHECK(r.value_lo() > 0.5);
    CHECK(r.value_hi() < 0.85);
    // geometric decay with the level once the factor sits below 1
    auto r3 = cover_sum(gs, p, 3, 0.6);
    CHECK(r3.log_mid() == Catch::Approx(3 * r.log_mid()).epsilon(1e-9));

    auto div = cover_sum(gs, p, 1, 0.45);  // (1+theta)s < 1: tail diverges
    CHECK(div.divergent);
    CHECK(div.certainly_divergent);
}

TEST_CASE("moran root matches an independent bisection", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    auto b = constraint_model::good_band(2, 4);
    auto est = moran_root(b, p, 1, 1e-9);
    double oracle = band24_root_oracle();
    CHECK(est.s_star == Catch::Approx(oracle).margin(1e-8));
    CHECK(est.s_star == Catch::Approx(0.46409055399).margin(1e-6));
    CHECK(std::abs(est.s_star - 0.466) < 0.005);
    CHECK(est.s_lo <= est.s_star);
    CHECK(est.s_star <= est.s_hi);
    CHECK(est.theory == Catch::Approx(0.5));

    // self-consistency at the root
    auto back = cover_sum(b, p, 1, est.s_star);
    CHECK(std::abs(back.log_mid()) < 1e-8);

    // the root of a level-homogeneous model does not depend on the level
    auto est4 = moran_root(b, p, 4, 1e-9);
    CHECK(est4.s_star == Catch::Approx(est.s_star).margin(1e-8));
}

TEST_CASE("moran root rises towards one half along minimal bands", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    double prev = 0;
    for (index_t n : {index_t(10), index_t(100), index_t(1000)}) {
        auto est = moran_root(constraint_model::good_band_minimal(n), p);
        CHECK(est.s_star > prev);
        prev = est.s_star;
    }
    CHECK(std::abs(prev - 0.5) <= 0.01);
    // frozen oracle values for the three minimal bands
    CHECK(moran_root(constraint_model::good_band_minimal(10), p).s_star
          == Catch::Approx(0.498822843188).margin(1e-6));
    CHECK(moran_root(constraint_model::good_band_minimal(100), p).s_star
          == Catch::Approx(0.499700781450).margin(1e-6));
    CHECK(moran_root(constraint_model::good_band_minimal(1000), p).s_star
          == Catch::Approx(0.499993002445).margin(1e-6));
}

TEST_CASE("singleton bands have no moran root", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    auto b = constraint_model::good_band(3, 3);
    try {
        moran_root(b, p);
        FAIL("expected no_root_error");
    } catch (const no_root_error& e) {
        CHECK(e.value_at_lo < 1.0);
        CHECK(e.value_at_lo > 0.99);  // (1/12)^0.001
        CHECK(e.value_at_hi == Catch::Approx(1.0 / 12));
    }
}

TEST_CASE("moran root through an envelope superset", "[dimension]")
{
    partition<real128> p(partition_spec::classical());
    auto env = constraint_model::envelope(p, 0.1);
    auto est = moran_root(env, p, 6, 1e-7);
    CHECK(est.s_star > 0.3);
    CHECK(est.s_star < 1.0);
    CHECK(est.level_log_factors.size() == 6);
}

TEST_CASE("frostman measures", "[dimension]")
{
    auto b = constraint_model::good_band(2, 4);
    CHECK(frostman_measure<rational>(b, vec({2})) == rational(6, 13));

    rational total = 0;
    for (index_t l = 2; l <= 4; ++l)
        total += frostman_measure<rational>(b, vec({l}));
    CHECK(total == 1);

    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    CHECK(frostman_measure<rational>(j, vec({2, 5})) == rational(1, 10));

    CHECK_THROWS_AS(frostman_measure<rational>(b, vec({7})), std::domain_error);
    auto gs = constraint_model::good_set(3);
    CHECK_THROWS_AS(frostman_measure<rational>(gs, vec({5})), std::domain_error);
}

TEST_CASE("frostman mass splits exactly across children", "[dimension]")
{
    auto env = constraint_model::envelope_custom_f({2, 2, 3});
    // the level-1 cylinders [2, g(1)] carry total mass 1, each splitting its
    // mass over admissible children in proportion 1/(S_k l)
    rational total = 0;
    index_t g1 = env.envelope_g(1);
    for (index_t l = 2; l <= g1; ++l)
        total += frostman_measure<rational>(env, vec({l}));
    CHECK(total == 1);
}

TEST_CASE("frostman domination by the cylinder measure", "[dimension]")
{
    // nu(C) <= lambda(C)^(1/(1+theta+eps)) for every cylinder up to level 6
    // on minimal bands (those have S > 1, the hypothesis behind the bound).
    // Both sides factor per level, so the worst cylinder repeats the worst
    // digit; the per-digit check below therefore covers all of them.
    partition<real128> p(partition_spec::classical());
    const double expo = 1.0 / 2.1;
    for (index_t n : {index_t(10), index_t(14), index_t(50)}) {
        auto b = constraint_model::good_band_minimal(n);
        real128 s = b.band_mass<real128>();
        REQUIRE(s > 1);
        double log_s = std::log(to_double(s));
        for (index_t d = n; d <= b.band_top(); ++d) {
            double per_level = -log_s - std::log(static_cast<double>(d))
                               - expo * p.log_atom_d(d);
            REQUIRE(per_level <= 1e-12);
        }
        // spot-check full cylinders through the public measure as well
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            for (std::size_t k : {std::size_t(1), std::size_t(3), std::size_t(6)}) {
                auto digits = b.sample(k, seed);
                real128 nu = frostman_measure<real128>(b, digits);
                real128 lam = cylinder_measure(p, std::span<const index_t>(digits.digits));
                REQUIRE(to_double(log(nu)) <= expo * to_double(log(lam)) + 1e-12);
            }
        }
    }
}

TEST_CASE("empirical holder exponent", "[dimension]")
{
    partition<real128> p(partition_spec::classical());

    auto dirac = constraint_model::good_band(3, 3);
    double e0 = empirical_holder(dirac, p, measure_kind::nu, 10, 8, 3);
    CHECK(std::abs(e0) < 1e-12);

    auto b = constraint_model::good_band(2, 4);
    double e = empirical_holder(b, p, measure_kind::nu, 1000, 12, 2024);
    CHECK(e > 0.35);
    CHECK(e < 0.55);

    CHECK_THROWS_AS(empirical_holder(b, p, measure_kind::digit_reciprocal, 10, 6, 1),
                    std::domain_error);
    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    CHECK_THROWS_AS(empirical_holder(j, p, measure_kind::nu, 10, 6, 1), std::domain_error);
    double ej = empirical_holder(j, p, measure_kind::digit_reciprocal, 200, 10, 7);
    CHECK(ej > 0.3);
    CHECK(ej < 0.7);
}

TEST_CASE("tilde cover sums squeeze around sigma", "[dimension]")
{
    partition<double> p(partition_spec::classical());
    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    // sigma = 1/2; above it the covers shrink with the level, below they grow
    double hi5 = cover_sum(j, p, 5, 0.55, true).log_mid();
    double hi10 = cover_sum(j, p, 10, 0.55, true).log_mid();
    CHECK(hi10 < hi5);
    double lo5 = cover_sum(j, p, 5, 0.45, true).log_mid();
    double lo10 = cover_sum(j, p, 10, 0.45, true).log_mid();
    CHECK(lo10 > lo5);
}
