#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "alueroth/constraints.hpp"

using namespace alueroth;

namespace {
std::vector<index_t> vec(std::initializer_list<index_t> d) { return d; }
}

TEST_CASE("minimal band top from the harmonic crossing", "[constraints]")
{
    // independent oracle: brute-force partial sums of 1/i
    auto brute_minimal = [](index_t n) {
        real128 s = 0;
        index_t i = n;
        for (;; ++i) {
            s += real128(1) / i;
            if (s > 1)
                return i;
        }
    };
    CHECK(brute_minimal(2) == 4);  // 1/2 + 1/3 + 1/4 = 13/12 > 1
    CHECK(constraint_model::good_band_minimal(2).band_top() == 4);
    CHECK(constraint_model::good_band_minimal(10).band_top() == brute_minimal(10));
    CHECK(constraint_model::good_band_minimal(10).band_top() == 26);
    CHECK(constraint_model::good_band_minimal(100).band_top() == brute_minimal(100));
    CHECK(constraint_model::good_band_minimal(100).band_top() == 270);
    CHECK(constraint_model::good_band_minimal(1000).band_top() == 2717);

    auto m = constraint_model::good_band_minimal(2);
    CHECK(m.band_mass<rational>() == rational(13, 12));
}

TEST_CASE("admissible ranges per model", "[constraints]")
{
    auto gs = constraint_model::good_set(5);
    auto r = gs.admissible_range(3);
    CHECK(r.lo == 6);
    CHECK_FALSE(r.hi.has_value());

    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    auto rj = j.admissible_range(3);
    CHECK(rj.lo == 8);
    CHECK(rj.hi == 31);

    auto b = constraint_model::good_band(2, 4);
    auto rb = b.admissible_range(7);
    CHECK(rb.lo == 2);
    CHECK(rb.hi == 4);

    // jarnik windows hold exactly (N - 1) * s_n digits
    for (index_t level = 1; level <= 10; ++level) {
        auto w = j.admissible_range(level);
        CHECK(*w.hi - w.lo + 1 == 3 * j.sequence().s(level));
    }
}

TEST_CASE("good_set free prefix leaves early levels unconstrained", "[constraints]")
{
    auto gs = constraint_model::good_set(9, 3);
    CHECK(gs.admissible_range(1).lo == 1);
    CHECK(gs.admissible_range(2).lo == 1);
    CHECK(gs.admissible_range(3).lo == 10);
    CHECK(gs.contains(vec({1, 2, 11, 12})));
    CHECK_FALSE(gs.contains(vec({1, 2, 9})));
}

TEST_CASE("contains honours ranges and monotone coupling", "[constraints]")
{
    auto env = constraint_model::envelope_custom_f({2, 2, 2, 2});
    CHECK_FALSE(env.contains(vec({3, 2})));  // monotone coupling violated
    CHECK(env.contains(vec({2, 3})));

    auto b = constraint_model::good_band(2, 4);
    CHECK(b.contains(vec({2, 4, 3})));
    CHECK_FALSE(b.contains(vec({2, 5})));

    sequence_spec geo{sequence_kind::geometric, 2};
    auto j = constraint_model::jarnik(geo, 4);
    CHECK(j.contains(vec({2, 5, 8})));
    CHECK_FALSE(j.contains(vec({2, 5, 7})));
    CHECK_THROWS_AS(b.contains(std::span<const index_t>()), std::domain_error);
}

TEST_CASE("model construction rejects bad parameters", "[constraints]")
{
    sequence_spec geo{sequence_kind::geometric, 2};
    CHECK_THROWS_AS(constraint_model::jarnik(geo, 3), std::invalid_argument);
    CHECK_THROWS_AS(constraint_model::envelope_custom_f({5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(constraint_model::good_band(5, 4), std::invalid_argument);
    CHECK_THROWS_AS(constraint_model::good_set(5, 1, 4), std::invalid_argument);
    sequence_spec bad{sequence_kind::geometric, 1};
    CHECK_THROWS_AS(constraint_model::jarnik(bad, 4), std::invalid_argument);
}

TEST_CASE("envelope windows satisfy the harmonic threshold minimally", "[constraints]")
{
    partition<real128> p(partition_spec::classical());
    auto env = constraint_model::envelope(p, 0.1);
    CHECK(env.envelope_f_offset() == 8);
    CHECK(env.envelope_f(1) == 9);
    for (index_t n = 1; n <= 10000; n = n * 3 + 1) {
        index_t f = env.envelope_f(n);
        index_t g = env.envelope_g(n);
        CHECK(f < g);
        CHECK(g <= 8 * f);
        real128 s = env.envelope_level_mass<real128>(n);
        CHECK(s > 1);
        CHECK(s <= 1 + real128(1) / f);  // minimality of g
        CHECK(env.envelope_f(n + 1) >= f);
    }
}

TEST_CASE("envelope offset adapts to the partition", "[constraints]")
{
    partition<real128> p(partition_spec::classical());
    // eps = 0.1 admits the default offset; a checked offset below the
    // required power law is rejected
    CHECK(constraint_model::envelope(p, 0.1, 8).envelope_f_offset() == 8);
    CHECK_THROWS_AS(constraint_model::envelope(p, 0.001, 8), std::invalid_argument);
    CHECK_THROWS_AS(constraint_model::envelope(p, -0.5), std::invalid_argument);
    auto tiny_eps = constraint_model::envelope(p, 0.01);
    CHECK(tiny_eps.envelope_f_offset() > 8);
}

TEST_CASE("sampling is deterministic and lands inside the model", "[constraints]")
{
    sequence_spec geo{sequence_kind::geometric, 2};
    std::vector<constraint_model> models = {
        constraint_model::good_band(2, 4),
        constraint_model::good_band_minimal(10),
        constraint_model::jarnik(geo, 4),
        constraint_model::envelope_custom_f({2, 3, 3, 5, 5, 5, 6}),
        constraint_model::good_set(7, 1, 100),
    };
    for (const auto& m : models) {
        auto a = m.sample(12, 42);
        auto b = m.sample(12, 42);
        CHECK(a == b);
        CHECK(m.sample(12, 43) != a);
        for (std::uint64_t seed = 0; seed < 2500; ++seed)
            REQUIRE(m.contains(m.sample(8, seed)));
    }
}

TEST_CASE("singleton band sampling is forced", "[constraints]")
{
    auto b = constraint_model::good_band(3, 3);
    CHECK(b.sample(4, 9).digits == vec({3, 3, 3, 3}));
}

TEST_CASE("unbounded sampling needs a cap", "[constraints]")
{
    auto gs = constraint_model::good_set(5);
    CHECK_THROWS_AS(gs.sample(3, 1), sampling_error);
}

TEST_CASE("sequence families", "[constraints]")
{
    sequence_spec geo{sequence_kind::geometric, 3};
    CHECK(geo.s(4) == 81);
    CHECK(geo.log_s(4) == Catch::Approx(4 * std::log(3.0)));
    CHECK(geo.analytic_tau() == 0.0);

    sequence_spec dexp{sequence_kind::doubly_exponential, 2};
    CHECK(dexp.s(3) == 256);
    CHECK(dexp.analytic_tau() == 1.0);
    CHECK_THROWS_AS(dexp.s(63), std::overflow_error);
    CHECK(dexp.log_s(100) > 0);  // closed form survives integer overflow

    sequence_spec lin{sequence_kind::linear, 0, 5};
    CHECK(lin.s(3) == 8);
    CHECK(lin.analytic_tau() == 0.0);

    sequence_spec cust{sequence_kind::custom, 0, 0, {2, 4, 8}};
    CHECK(cust.s(2) == 4);
    CHECK(cust.s(5) == 32);  // extends with the last ratio
    CHECK_FALSE(cust.analytic_tau().has_value());

    sequence_spec one{sequence_kind::custom, 0, 0, {7}};
    CHECK(one.s(5) == 7);  // single-entry lists extend as a constant
}
