#include "mgcc/adaptive.hpp"
#include "mgcc/attacks.hpp"
#include "mgcc/error.hpp"
#include "mgcc/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace mgcc;
using namespace mgcc::adaptive;

namespace {

LedgerEntry entry(double t_ii, double t_ij, double t_i0)
{
    LedgerEntry e;
    e.t_trigger = 10.0;
    e.own_stamp = 10.0 - t_ii;
    e.neighbour_stamp = 10.0 - t_ij;
    e.actuated = 10.0 + t_i0;
    return e;
}

}  // namespace

TEST_SUITE("adaptive")
{
    TEST_CASE("observed delay aggregate")
    {
        CHECK(gamma(entry(0.01, 0.02, 0.005), 2, 2) == doctest::Approx(0.08));
        CHECK(gamma(entry(0, 0, 0), 2, 2) == 0.0);
        CHECK(gamma(entry(0.1, 0.2, 0), 1, 2) == doctest::Approx(0.5));
        LedgerEntry missing;
        CHECK_THROWS_AS(missing.t_ii(), Error);
        CHECK_THROWS_AS(gamma(missing, 1, 1), Error);
    }

    TEST_CASE("parameter adaptation")
    {
        AdaptiveParams p = adapt_params(0.08, 1.5, 1.1, 0.01);
        CHECK(p.eps == doctest::Approx(0.12));
        CHECK(p.rate == doctest::Approx(1.65));
        p = adapt_params(0.0, 1.5, 1.1, 0.01);
        CHECK(p.eps == doctest::Approx(0.01));
        CHECK(p.rate == doctest::Approx(0.55));
        p = adapt_params(100.0, 1.5, 1.1, 0.01);
        CHECK(p.eps == doctest::Approx(150.0));
        CHECK_THROWS_AS(adapt_params(0.1, 1.0, 1.1, 0.01), Error);
        CHECK_THROWS_AS(adapt_params(0.1, 1.5, 1.0, 0.01), Error);
    }

    TEST_CASE("adapted rate is capped and the decrement condition holds")
    {
        Rng rng(4);
        const double alpha = 1.5;
        const double beta = 1.1;
        for (int k = 0; k < 1000; ++k) {
            const double g = rng.uniform() < 0.1 ? 0.0 : rng.uniform(0.0, 2.0);
            const AdaptiveParams p = adapt_params(g, alpha, beta, 0.01);
            CHECK(p.eps >= 0.01);
            CHECK(p.eps > g);
            CHECK(p.rate > 0.5);
            CHECK(p.rate <= beta * alpha / (2 * (alpha - 1)) + 1e-12);
            // D (1 - 1/(2R)) - Gamma > 0 at |D| >= eps
            CHECK(p.eps * (1 - 1 / (2 * p.rate)) - g > 0);
        }
    }

    TEST_CASE("scaled input")
    {
        CHECK(scaled_input(1, 0.1, 1.0, 0.1) == doctest::Approx(0.5));
        CHECK(scaled_input(-1, 0.3, 2.0, 0.0) == doctest::Approx(-1.0));
        CHECK(scaled_input(0, 0.3, 2.0, 0.4) == 0.0);
    }

    TEST_CASE("actuation estimator")
    {
        LedgerEntry e;
        e.t_trigger = 2.0;
        actuation_estimator(e, 2.0, 0.05);
        CHECK(e.t_hat_i0 == doctest::Approx(0.05));
        CHECK(e.t_i0() == doctest::Approx(0.05));

        LedgerEntry ok;
        ok.t_trigger = 1.0;
        ok.actuated = 1.0;
        CHECK(ok.t_i0() == 0.0);

        // Failures at t, t + 0.05, success at t + 0.1.
        LedgerEntry two;
        two.t_trigger = 1.0;
        actuation_estimator(two, 1.0, 0.05);
        const double first = two.t_hat_i0;
        actuation_estimator(two, 1.05, 0.05);
        CHECK(two.t_hat_i0 >= first);
        two.actuated = 1.1;
        CHECK(two.t_hat_i0 == doctest::Approx(two.t_i0()));
    }

    TEST_CASE("scaled input moves the state like a bang-zero input")
    {
        Rng rng(31);
        for (int trial = 0; trial < 1000; ++trial) {
            attacks::DosParams p;
            p.eta = std::floor(rng.uniform(1, 4));
            p.tau_f = rng.uniform(0.5, 5);
            p.tau_d = rng.uniform(2, 10);
            p.delta_star = rng.uniform(0.005, 0.05);
            p.kappa = rng.uniform(0, 0.5);
            const double phi = attacks::podf_bound(p);
            const auto seq = attacks::generate_sequence(p, 50.0, 1000 + trial);

            const double vartheta = rng.uniform(0.01, 2.0);
            const int sign = rng.uniform() < 0.5 ? -1 : 1;
            const double s_k = rng.uniform(0.0, 20.0);
            const double t_next = s_k + vartheta;
            double s_next = t_next;
            while (seq.attacked(s_next) && s_next < 49.0) {
                s_next += p.delta_star;
            }
            REQUIRE(s_next - t_next <= phi + 1e-9);

            const double u_scaled = sign * vartheta / (vartheta + phi);
            CHECK(scaled_input(sign, vartheta, 1.0, phi) == doctest::Approx(u_scaled));
            const double integral = u_scaled * (s_next - s_k);
            const double t_star = equivalent_switch_time(s_k, s_next, vartheta, phi);
            CHECK(std::abs(integral - sign * (t_star - s_k)) <= 1e-9);
            CHECK(std::abs(integral) <= vartheta + 1e-12);
            CHECK(t_star >= s_k + vartheta * vartheta / (vartheta + phi) - 1e-12);
            CHECK(t_star <= t_next + 1e-12);
        }
    }
}
