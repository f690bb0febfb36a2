#include "mgcc/aggregation.hpp"
#include "mgcc/error.hpp"
#include "mgcc/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace mgcc;
using namespace mgcc::aggregation;

TEST_SUITE("aggregation")
{
    TEST_CASE("equivalent model examples")
    {
        const double two_pi = 2 * M_PI;
        const std::vector<DgSpec> equal{{10, 1, 50 * two_pi, 31.4}, {10, 1, 52 * two_pi, 31.4}};
        MgEquivalent mg = aggregate(equal);
        CHECK(mg.droop == doctest::Approx(0.5));
        CHECK(mg.omega == doctest::Approx(51 * two_pi));

        const std::vector<DgSpec> mixed{{1, 1, 1, 5}, {1, 2, 4, 5}};
        mg = aggregate(mixed, 3.0);
        CHECK(mg.omega == doctest::Approx(2.0));
        CHECK(mg.droop == doctest::Approx(2.0 / 3.0));
        CHECK(mg.omega_n == doctest::Approx(2.0 + 2.0));

        const std::vector<DgSpec> single{{7, 0.3, 49.9, 10}};
        mg = aggregate(single);
        CHECK(mg.droop == doctest::Approx(0.3));
        CHECK(mg.omega == doctest::Approx(49.9));

        CHECK_THROWS_AS(aggregate(std::vector<DgSpec>{}), Error);
        CHECK_THROWS_AS(aggregate(std::vector<DgSpec>{{1, 1, 1, 5}, {1, 1, 1, 6}}), Error);
    }

    TEST_CASE("cutoff cancels")
    {
        Rng rng(2);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<DgSpec> a;
            for (int k = 0; k < 5; ++k) {
                a.push_back({1, rng.uniform(0.1, 2), rng.uniform(49, 51), 31.4});
            }
            std::vector<DgSpec> b = a;
            const double wc = rng.uniform(0.1, 1000);
            for (DgSpec& dg : b) {
                dg.cutoff = wc;
            }
            CHECK(aggregate(a).omega == doctest::Approx(aggregate(b).omega).epsilon(1e-12));
            CHECK(aggregate(a).droop == aggregate(b).droop);
        }
    }

    TEST_CASE("power sharing follows the ratings")
    {
        const std::vector<double> ratings{20, 20, 15, 15, 10};
        const auto dgs = dgs_from_ratings(ratings, 0.5);
        const auto shares = share_power(80.0, dgs);
        REQUIRE(shares.size() == 5);
        const std::vector<double> ratio{4, 4, 3, 3, 2};
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(shares[k] == doctest::Approx(ratings[k]));
            CHECK(shares[k] / shares[4] == doctest::Approx(ratio[k] / 2));
            CHECK(dgs[k].droop * shares[k] == doctest::Approx(dgs[0].droop * shares[0]));
        }
        CHECK(std::accumulate(shares.begin(), shares.end(), 0.0) == doctest::Approx(80.0));

        CHECK(share_power(12.0, dgs_from_ratings(std::vector<double>{9}, 1.0))[0] == 12.0);
        for (const double s : share_power(9.0, dgs_from_ratings(std::vector<double>{5, 5, 5}, 1.0))) {
            CHECK(s == doctest::Approx(3.0));
        }
        std::vector<DgSpec> off = dgs;
        off[1].droop *= 1.5;
        try {
            share_power(80.0, off);
            FAIL("expected InconsistentDroops");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InconsistentDroops);
        }
    }

    TEST_CASE("objectives")
    {
        const std::vector<double> f{50, 50, 50};
        const Objectives o = objective_metrics(f, f, 50);
        CHECK(o.sync_error == 0.0);
        CHECK(o.sharing_error == 0.0);
        CHECK(o.ref_deviation == 0.0);
        const Objectives p = objective_metrics(std::vector<double>{49.8, 50.1},
                                               std::vector<double>{0.2, -0.1}, 50);
        CHECK(p.sync_error == doctest::Approx(0.3));
        CHECK(p.sharing_error == doctest::Approx(0.3));
        CHECK(p.ref_deviation == doctest::Approx(0.2));
        CHECK(set_point(49.5, 0.01, 50) == doctest::Approx(50.0));
    }
}
