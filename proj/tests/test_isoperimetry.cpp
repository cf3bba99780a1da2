#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "heatlab/errors.hpp"
#include "heatlab/h_transform.hpp"
#include "heatlab/isoperimetry.hpp"
#include "heatlab/spectral.hpp"

using namespace heatlab;

namespace {

MonotoneTab random_step(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int k = 1 + static_cast<int>(U(rng) * 10);
    std::vector<double> x{0.0}, y;
    double h = 1.0 + 5.0 * U(rng), t = 0.0;
    for (int j = 0; j < k; ++j) {
        y.push_back(h);
        h *= 0.1 + 0.8 * U(rng);
        t += 0.05 + 2.0 * U(rng);
        x.push_back(t);
    }
    y.push_back(0.0);
    return MonotoneTab(x, y, Direction::nonincreasing, Interp::step, Extrapolation::hold);
}

}  // namespace

TEST_CASE("inverse of a single step") {
    MonotoneTab phi({0.0, 1.0}, {2.0, 0.0}, Direction::nonincreasing, Interp::step, Extrapolation::hold);
    InversePair p = generalized_inverse(phi);
    CHECK(p.common_integral == doctest::Approx(2.0));
    CHECK(p.phi_star.integral() == doctest::Approx(2.0));
    CHECK(p.phi_star(0.0) == 1.0);
    CHECK(p.phi_star(1.99) == 1.0);
    CHECK(p.phi_star(2.0) == 0.0);
    CHECK(p.phi_star(5.0) == 0.0);
}

TEST_CASE("inverse of sampled exponential") {
    std::vector<double> t, y;
    for (int i = 0; i <= 40000; ++i) {
        t.push_back(1e-3 * i);
        y.push_back(std::exp(-t.back()));
    }
    InversePair p = generalized_inverse(MonotoneTab(t, y, Direction::nonincreasing, Interp::linear, Extrapolation::zero));
    CHECK(p.phi.integral() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.phi_star.integral() == doctest::Approx(1.0).epsilon(1e-6));
    for (double s : {0.01, 0.2, 0.5, 0.9}) CHECK(p.phi_star(s) == doctest::Approx(-std::log(s)).epsilon(1e-6));
    CHECK(p.phi_star(1.5) == 0.0);
}

TEST_CASE("inverse integral identity and double inversion on random steps") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        MonotoneTab phi = random_step(rng);
        InversePair once = generalized_inverse(phi);
        CHECK(once.phi_star.integral() == doctest::Approx(phi.integral()).epsilon(1e-10));
        CHECK(once.common_integral == doctest::Approx(phi.integral()).epsilon(1e-10));
        CHECK(once.phi_star.right_continuous());
        MonotoneTab back = generalized_inverse(once.phi_star).phi_star;
        for (std::size_t j = 0; j + 1 < phi.x().size(); ++j) {
            double mid = 0.5 * (phi.x()[j] + phi.x()[j + 1]);
            CHECK(back(mid) == phi(mid));
        }
    }
}

TEST_CASE("increasing input is rejected") {
    MonotoneTab up({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, Direction::nondecreasing);
    CHECK_THROWS_AS(generalized_inverse(up), ArgumentError);
}

TEST_CASE("half-line profiles") {
    IsoProfile one = profile_halfline(WeightedModel(RadialProfile::power(0.0, 2)), 1e6);
    for (double v : {1e-3, 1.0, 1e3}) CHECK(one(v) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(one.j_over_v_nonincreasing);
    auto hexp = std::make_shared<FunctionWeight>([](double r) { return Jet{0.5 * r, 0.5, 0.0}; });
    IsoProfile ex = profile_halfline(WeightedModel(RadialProfile::power(0.0, 2), hexp));
    for (double v : {1e-2, 0.7, 10.0, 1e4, 1e8}) CHECK(ex(v) == doctest::Approx(v + 1.0).epsilon(1e-6));
    CHECK(ex.j_over_v_nonincreasing);
    CHECK(ratio_nonincreasing(ex, 1e-3, 1e8));
    CHECK_THROWS_AS(profile_halfline(WeightedModel(RadialProfile::exp_alpha(0.5, 2))), PreconditionError);
    CHECK_THROWS_AS(ex(0.0), RangeError);
    WeightedModel line(RadialProfile::power(0.0, 2).on_full_line());
    CHECK_THROWS_AS(profile_halfline(line), ArgumentError);
}

TEST_CASE("half-line profile is attained on balls") {
    WeightedModel e(RadialProfile::euclidean(3));
    IsoProfile J = profile_halfline(e, 1e12);
    for (double R : {0.1, 1.0, 3.3, 50.0}) CHECK(J(volume(e, R)) == doctest::Approx(e.area_tilde(R)).epsilon(1e-7));
}

TEST_CASE("transformed alpha = 1/2 profile has the log-type shape") {
    TwoEndSetup s = prepare_two_end(0.5, 2, RadialProfile::hyperbolic(2));
    for (double v = 1e2; v <= 1e8; v *= 3.0) {
        double q = s.J_nu(v) * std::log(v) / v;
        CHECK(q >= 0.1);
        CHECK(q <= 10.0);
    }
}

TEST_CASE("ratio envelope") {
    // J(v) = v for v < 1, v^2 for v > 1: J/v dips then rises.
    IsoProfile J;
    J.J = [](double v) { return v < 1.0 ? v : (v < 2.0 ? 0.5 * v : v * v / 4.0); };
    IsoProfile env = ratio_envelope(J, 1e-3, 1e3, 2000);
    CHECK(ratio_nonincreasing(env, 1e-3, 1e3));
    CHECK(env(0.5) == doctest::Approx(0.5));
    CHECK(env(100.0) == doctest::Approx(50.0).epsilon(1e-6));
    for (double v : {0.01, 0.3, 1.5, 7.0, 400.0}) CHECK(env(v) <= J(v) * (1.0 + 1e-9));
}

TEST_CASE("sphere profile") {
    IsoProfile s3 = profile_sphere(3, 2.0);
    CHECK(s3(0.5) == doctest::Approx(2.0 * std::sqrt(0.5)));
    for (int i = 1; i < 50; ++i) {
        double v = i / 50.0;
        CHECK(s3(v) == doctest::Approx(s3(1.0 - v)).epsilon(1e-14));
    }
    IsoProfile s2 = profile_sphere(2, 1.5);
    for (double v : {0.01, 0.5, 0.97}) CHECK(s2(v) == doctest::Approx(1.5));
    CHECK(s3.total_mass == 1.0);
}

TEST_CASE("h0 examples") {
    PositiveFn id = [](double x) { return x; };
    PositiveFn one = [](double) { return 1.0; };
    for (double v : {0.1, 3.0, 50.0}) CHECK(h0_inf(id, id, 7.0, v) == doctest::Approx(2.0 * v).epsilon(1e-6));
    CHECK(h0_inf(one, one, 10.0, 4.0) == doctest::Approx(4.0).epsilon(1e-6));
    // f = sqrt, g = id, P = 2, v = 8 against a dense log scan of y in [1e-12, 1];
    // the objective sqrt(8y) + 8 approaches its infimum 8 as y -> 0.
    PositiveFn sq = [](double x) { return std::sqrt(x); };
    double brute = INFINITY;
    const int N = 1000000;
    for (int i = 0; i < N; ++i) {
        double y = std::pow(10.0, -12.0 + 12.0 * i / (N - 1)), x = 8.0 / y;
        brute = std::min(brute, std::sqrt(x) * y + y * x);
    }
    double got = h0_inf(sq, id, 2.0, 8.0);
    CHECK(got == doctest::Approx(brute).epsilon(1e-6));
    CHECK(got == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(got <= brute * (1.0 + 1e-9));
}

TEST_CASE("functional lower bound examples") {
    PositiveFn id = [](double x) { return x; };
    CHECK(functional_lower_bound(id, id, 10.0, 1.0) == doctest::Approx(0.125));
    CHECK(functional_lower_bound(id, id, 10.0, 100.0) == doctest::Approx(12.5));
}

TEST_CASE("lemma hypotheses are validated") {
    PositiveFn id = [](double x) { return x; };
    PositiveFn down = [](double x) { return 1.0 / (1.0 + x); };
    PositiveFn square = [](double x) { return x * x; };
    CHECK_THROWS_AS(validate_lemma_hypotheses(down, id, 4.0), PreconditionError);
    CHECK_THROWS_AS(validate_lemma_hypotheses(square, id, 4.0), PreconditionError);
    CHECK_THROWS_AS(h0_inf(id, square, 4.0, 1.0), PreconditionError);
    CHECK_NOTHROW(validate_lemma_hypotheses(id, id, 4.0));
}

TEST_CASE("lemma bound never exceeds the brute-force functional") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int inst = 0; inst < 4; ++inst) {
        double a = 0.5 + U(rng), p = U(rng), P = 1.0 + 4.0 * U(rng), v = 0.5 + 20.0 * U(rng);
        PositiveFn f = [=](double x) { return a * std::pow(x, p); };
        PositiveFn g = [=](double y) { return std::sqrt(std::min(y, P - y)); };
        double bound = functional_lower_bound(f, g, P, v);
        for (int s = 0; s < 100; ++s) {
            int k = 1 + static_cast<int>(U(rng) * 6);
            std::vector<double> hs, ts;
            double h = 1.0, t = 0.0;
            for (int j = 0; j < k; ++j) {
                hs.push_back(h);
                h *= 0.1 + 0.85 * U(rng);
                ts.push_back(t += U(rng) + 1e-3);
            }
            double scale = P * (0.05 + 0.9 * U(rng)) / ts.back();
            for (double& x : ts) x *= scale;
            double integral = 0.0, prev = 0.0;
            for (int j = 0; j < k; ++j) integral += hs[j] * (ts[j] - prev), prev = ts[j];
            for (double& x : hs) x *= v / integral;
            CHECK(lemma_functional(f, g, hs, ts) >= bound * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("warped product profile") {
    IsoProfile J1;
    J1.J = [](double v) { return v / (1.0 + std::log1p(v)); };
    J1.j_over_v_nonincreasing = true;
    IsoProfile circle = profile_sphere(2, 1.0);
    IsoProfile W = warped_product_profile(J1, circle, 1.0, 1.0);
    for (double v : {0.5, 4.0, 100.0}) {
        double expect = 0.5 * std::min(h0_inf(J1.J, circle.J, 1.0, v) / 6.0, J1(v) / 8.0);
        CHECK(W(v) == doctest::Approx(expect).epsilon(1e-9));
    }
    IsoProfile W4 = warped_product_profile(J1, circle, 1.0, 4.0);
    CHECK(W4(3.0) == doctest::Approx(W(3.0) / 4.0).epsilon(1e-9));
}

TEST_CASE("warped product over the transformed alpha = 1/2 end") {
    TwoEndSetup s = prepare_two_end(0.5, 2, RadialProfile::hyperbolic(2));
    IsoProfile J1 = ratio_envelope(s.J_nu, 1e-8, 1e28);
    IsoProfile W = warped_product_profile(J1, profile_sphere(2), 1.0, 1.0);
    double lo = INFINITY, hi = 0.0;
    for (double v = 1e2; v <= 1e8; v *= 10.0) {
        double q = W(v) / J1(v);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK(hi / lo < 10.0);
    lo = INFINITY, hi = 0.0;
    for (double v = 1e-4; v <= 2.0; v *= 3.0) {
        double q = W(v) / std::sqrt(v);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK(hi / lo < 10.0);
}

TEST_CASE("asymptotic profile") {
    IsoProfile a1 = asymptotic_profile(1.0, 2, 0.3);
    for (double w : {2.0, 10.0, 1e6}) CHECK(a1(w) == doctest::Approx(0.3 * w));
    IsoProfile a2 = asymptotic_profile(0.5, 2, 0.7);
    for (double w : {2.0, 10.0, 1e6}) CHECK(a2(w) == doctest::Approx(0.7 * w / std::log(w)));
    for (double alpha : {0.2, 0.5, 1.0})
        for (int n : {2, 3, 5}) {
            IsoProfile a = asymptotic_profile(alpha, n, 1.3);
            CHECK(a(std::nextafter(2.0, 0.0)) == doctest::Approx(a(2.0)).epsilon(1e-12));
            CHECK(a(1.0) / a(0.5) == doctest::Approx(std::pow(2.0, (n - 1.0) / n)));
        }
}
