#include "mgcc/attacks.hpp"
#include "mgcc/error.hpp"
#include "mgcc/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace mgcc;
using namespace mgcc::attacks;

namespace {

DosParams params(double eta, double kappa, double tau_f, double tau_d, double delta_star)
{
    DosParams p;
    p.eta = eta;
    p.kappa = kappa;
    p.tau_f = tau_f;
    p.tau_d = tau_d;
    p.delta_star = delta_star;
    return p;
}

DosParams random_params(Rng& rng)
{
    // phi stays below 0.9
    const double tau_d = rng.uniform(1.5, 20.0);
    const double delta_star = rng.uniform(0.005, 0.2);
    const double tau_f = std::max(rng.uniform(0.5, 10.0), delta_star / (0.9 - 1.0 / tau_d));
    return params(std::floor(rng.uniform(1.0, 4.0)), rng.uniform(0.0, 1.0), tau_f, tau_d,
                  delta_star);
}

// Worst excess of both inequalities over windows whose ends come from a dense
// grid plus every transition point and a point just after each start (the
// frequency count is taken for windows closing just after a start).
std::pair<double, double> brute_excess(const DosSequence& s, const DosParams& p)
{
    std::set<double> points;
    const double h = s.horizon();
    for (int k = 0; k <= 400; ++k) {
        points.insert(h * k / 400.0);
    }
    for (const Interval& iv : s.intervals()) {
        points.insert(iv.start);
        points.insert(iv.end);
        points.insert(std::min(h, iv.start + 1e-9));
    }
    const std::vector<double> pts(points.begin(), points.end());
    double freq = -1e300;
    double dur = -1e300;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const double len = pts[b] - pts[a];
            const double n = static_cast<double>(s.transitions(pts[a], pts[b]));
            freq = std::max(freq, n - (p.eta + len / p.tau_f));
            dur = std::max(dur, s.attacked_measure(pts[a], pts[b]) - (p.kappa + len / p.tau_d));
        }
    }
    return {freq, dur};
}

DosSequence random_sequence(Rng& rng, double horizon)
{
    std::vector<Interval> ivs;
    double t = rng.uniform(0.0, 1.0);
    while (true) {
        const double len = rng.uniform(0.01, 1.0);
        if (t + len > horizon) {
            break;
        }
        ivs.push_back({t, t + len});
        t += len + rng.uniform(0.01, 2.0);
    }
    return DosSequence(ivs, horizon);
}

std::vector<double> attempt_train(double delta_star, double horizon, double offset)
{
    std::vector<double> t;
    for (double x = offset; x < horizon; x += delta_star) {
        t.push_back(x);
    }
    return t;
}

}  // namespace

TEST_SUITE("attacks")
{
    TEST_CASE("podf bound examples")
    {
        const DosParams p = params(1, 1, 5, 10, 0.1);
        CHECK(p.phi() == doctest::Approx(0.12));
        CHECK(podf_bound(p) == doctest::Approx(1.2 / 0.88).epsilon(1e-12));
        const DosParams zero = params(0, 0, 4, 3, 0.1);
        CHECK(podf_bound(zero) == doctest::Approx(0.1 / (1 - zero.phi())));
        CHECK_THROWS_AS(podf_bound(params(1, 1, 5, 1, 0.1)), Error);
        try {
            podf_bound(params(1, 1, 5, 1, 0.1));
        } catch (const Error& e) {
            CHECK(e.code() == Errc::BudgetInfeasible);
        }
    }

    TEST_CASE("calibrated kappa reaches the requested bound")
    {
        const DosParams p = params(2, 0, 2, 8, 0.01);
        const double kappa = calibrate_kappa(p, 0.0526);
        DosParams q = p;
        q.kappa = kappa;
        CHECK(podf_bound(q) == doctest::Approx(0.0526).epsilon(1e-12));
        CHECK_THROWS_AS(calibrate_kappa(p, 0.001), Error);
    }

    TEST_CASE("podf bound is monotone in every budget field")
    {
        Rng rng(3);
        for (int k = 0; k < 500; ++k) {
            const DosParams p = random_params(rng);
            const double base = podf_bound(p);
            DosParams q = p;
            q.eta += 1;
            CHECK(podf_bound(q) >= base);
            q = p;
            q.kappa += 0.1;
            CHECK(podf_bound(q) >= base);
            q = p;
            q.delta_star *= 1.05;
            if (q.phi() < 1) {
                CHECK(podf_bound(q) >= base);
            }
            q = p;
            q.tau_f *= 0.9;
            if (q.phi() < 1) {
                CHECK(podf_bound(q) >= base);
            }
            q = p;
            q.tau_d *= 0.95;
            if (q.phi() < 1) {
                CHECK(podf_bound(q) >= base);
            }
            CHECK(podf_bound(soften(p, 2.0)) <= base);
        }
    }

    TEST_CASE("verify examples")
    {
        const DosParams p = params(1, 1, 5, 10, 0.1);
        const DosSequence one({{0.0, 0.5}}, 1.0);
        CHECK(verify_sequence(one, p, 0.0, 1.0).passed());
        CHECK(verify_sequence(DosSequence({}, 5.0), p).passed());
        const DosSequence two({{0.0, 2.0}}, 2.0);
        const VerifyReport r = verify_sequence(two, params(1, 0, 5, 10, 0.1), 0.0, 2.0);
        CHECK_FALSE(r.duration_ok);
        REQUIRE(r.duration);
        CHECK(r.duration->lhs == doctest::Approx(2.0));
        CHECK(r.duration->rhs == doctest::Approx(0.2));
        CHECK(r.duration->describe().find("duration") != std::string::npos);
    }

    TEST_CASE("sequence construction")
    {
        const DosSequence s({{0, 1}, {1, 2}, {3, 4}}, 5);
        CHECK(s.intervals().size() == 2);  // touching windows merge
        CHECK(s.attacked(0.5));
        CHECK_FALSE(s.attacked(2.0));  // half-open
        CHECK(s.attacked_measure(0.5, 3.5) == doctest::Approx(2.0));
        CHECK(s.transitions(0, 3) == 1);
        CHECK(s.transitions(0, 3.000001) == 2);
        CHECK_THROWS_AS(DosSequence({{1, 0.5}}, 5), Error);
        CHECK_THROWS_AS(DosSequence({{0, 1}, {0.5, 2}}, 5), Error);
        CHECK_THROWS_AS(DosSequence({{4, 6}}, 5), Error);
    }

    TEST_CASE("verify agrees with a dense-grid brute force")
    {
        Rng rng(17);
        int passes = 0;
        int fails = 0;
        for (int trial = 0; trial < 150; ++trial) {
            const DosSequence s = random_sequence(rng, 12.0);
            const DosParams p = params(std::floor(rng.uniform(0, 3)), rng.uniform(0, 1.5),
                                       rng.uniform(0.5, 4), rng.uniform(1.2, 6), 0.01);
            const auto [freq, dur] = brute_excess(s, p);
            const VerifyReport r = verify_sequence(s, p);
            if (std::abs(freq) > 1e-6) {
                CHECK(r.frequency_ok == (freq < 0));
            }
            if (std::abs(dur) > 1e-6) {
                CHECK(r.duration_ok == (dur < 0));
            }
            (r.passed() ? passes : fails)++;
        }
        CHECK(passes > 0);
        CHECK(fails > 0);
    }

    TEST_CASE("generated sequences satisfy their budgets and are deterministic")
    {
        Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const DosParams p = random_params(rng);
            const DosSequence s = generate_sequence(p, 60.0, 42 + trial);
            const VerifyReport r = verify_sequence(s, p);
            CHECK(r.passed());
            CHECK(s == generate_sequence(p, 60.0, 42 + trial));
        }
        // Zero offsets: nothing can happen right at t = 0.
        const DosParams tight = params(0, 0, 2, 4, 0.01);
        const DosSequence s = generate_sequence(tight, 60.0, 42);
        CHECK(verify_sequence(s, tight).passed());
        for (const Interval& iv : s.intervals()) {
            CHECK(s.attacked_measure(0, iv.end) <= iv.end / 4 + 1e-9);
        }
        CHECK_THROWS_AS(generate_sequence(params(1, 1, 1, 1, 0.1), 10, 1), Error);
    }

    TEST_CASE("podf witness stays below the bound")
    {
        Rng rng(23);
        const DosSequence none({}, 10);
        const DosParams p0 = params(1, 0.2, 2, 5, 0.05);
        CHECK(podf_witness(none, p0, attempt_train(0.05, 10, 0)).max_delay == 0.0);

        const DosSequence single({{1.0, 1.1}}, 10);
        const PodfWitness w = podf_witness(single, p0, attempt_train(0.05, 10, 0.0));
        CHECK(w.failed_attempts > 0);
        CHECK(w.holds());

        for (int trial = 0; trial < 200; ++trial) {
            const DosParams p = random_params(rng);
            const double horizon = 40.0;
            for (const DosSequence& s :
                 {generate_sequence(p, horizon, trial), worst_case_sequence(p, horizon, p.delta_star)}) {
                REQUIRE(verify_sequence(s, p).passed());
                const PodfWitness wt =
                    podf_witness(s, p, attempt_train(p.delta_star, horizon, rng.uniform(0, p.delta_star)));
                CHECK(wt.max_delay <= wt.bound + 1e-9);
            }
        }
        const std::vector<double> crowded{0.0, 0.01};
        CHECK_THROWS_AS(podf_witness(none, p0, crowded), Error);
    }

    TEST_CASE("assumption 2 ordering from heavier communication budgets")
    {
        const DosParams local = params(2, 0.0158, 2, 8, 0.01);
        const DosParams comm = params(1, 0.1, 5, 5, 0.156);
        CHECK(podf_bound(local) <= podf_bound(comm));
    }
}
