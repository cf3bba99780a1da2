#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "heatlab/errors.hpp"
#include "heatlab/model_geometry.hpp"

using namespace heatlab;

namespace {

WeightedModel flat() { return WeightedModel(RadialProfile::power(0.0, 2)); }

}  // namespace

TEST_CASE("exp_alpha evaluates its closed form beyond the cap and blends C2 at the cap") {
    RadialProfile p = RadialProfile::exp_alpha(0.5, 3, 0.5);
    for (double r : {0.5, 1.0, 7.3, 40.0}) CHECK(p.psi(r).f == doctest::Approx(std::exp(-std::sqrt(r) / 2.0)).epsilon(1e-12));
    Jet lo = p.log_area(0.5 - 1e-9), hi = p.log_area(0.5 + 1e-9);
    CHECK(lo.f == doctest::Approx(hi.f).epsilon(1e-8));
    CHECK(lo.d1 == doctest::Approx(hi.d1).epsilon(1e-6));
    CHECK(lo.d2 == doctest::Approx(hi.d2).epsilon(1e-6));
    CHECK(p.log_area(0.0).d1 == doctest::Approx(0.0));
}

TEST_CASE("profile grammar") {
    RadialProfile p = parse_profile("family=exp_alpha alpha=0.5 n=2 cap_radius=0.25");
    CHECK(p.family() == Family::exp_alpha);
    CHECK(p.alpha() == 0.5);
    CHECK(p.cap_radius() == 0.25);
    CHECK_THROWS_AS(parse_profile("family=exp_alpha alpha=1.5 n=2"), ConfigError);
    CHECK_THROWS_AS(parse_profile("family=nosuch"), ConfigError);
    CHECK_THROWS_AS(parse_profile("family=euclidean n=2 bogus=1"), ConfigError);
}

TEST_CASE("volume examples") {
    CHECK(volume(WeightedModel(RadialProfile::euclidean(2)), 2.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(volume(WeightedModel(RadialProfile::exp_alpha(1.0, 2, 0.0)), 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
    std::vector<double> r, psi;
    for (int i = 0; i <= 200; ++i) {
        r.push_back(0.05 * i);
        psi.push_back(std::exp(-r.back()));
    }
    double v = volume(WeightedModel(RadialProfile::table(r, psi, 2)), 1.0);
    CHECK(std::fabs(v - (1.0 - std::exp(-1.0))) < 1e-4);
    CHECK_THROWS_AS(volume(WeightedModel(RadialProfile::table(r, psi, 2)), 20.0), RangeError);
}

TEST_CASE("volume is nondecreasing and additive") {
    WeightedModel m(RadialProfile::exp_alpha(0.5, 2));
    double prev = 0.0;
    for (double R = 0.25; R <= 30.0; R += 0.25) {
        double v = volume(m, R);
        CHECK(v >= prev);
        double split = volume(m, R - 0.25) + adaptive_simpson([&](double x) { return m.area_tilde(x); }, R - 0.25, R);
        CHECK(split == doctest::Approx(v).epsilon(1e-7));
        prev = v;
    }
}

TEST_CASE("capacity examples and monotonicity") {
    CHECK(capacity_annulus(flat(), 1.0, 3.0).capacity == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(capacity_annulus(WeightedModel(RadialProfile::euclidean(3)), 1.0, 2.0).capacity ==
          doctest::Approx(2.0).epsilon(1e-8));
    CHECK(capacity_annulus(WeightedModel(RadialProfile::exp_alpha(1.0, 2, 0.0)), 0.0, std::log(2.0)).capacity ==
          doctest::Approx(1.0).epsilon(1e-8));
    WeightedModel h(RadialProfile::hyperbolic(2));
    double prev = INFINITY;
    for (double b = 2.0; b < 10.0; b += 1.0) {
        double c = capacity_annulus(h, 1.0, b).capacity;
        CHECK(c < prev);
        prev = c;
    }
    CHECK(capacity_annulus(h, 1.5, 5.0).capacity > capacity_annulus(h, 1.0, 5.0).capacity);
    CapacityResult cr = capacity_annulus(h, 1.0, 4.0);
    CHECK(cr.potential(1.0) == doctest::Approx(1.0));
    CHECK(cr.potential(4.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(capacity_annulus(h, 3.0, 1.0), ArgumentError);
}

TEST_CASE("capacity to infinity vanishes exactly on parabolic ends") {
    WeightedModel ends[] = {flat(), WeightedModel(RadialProfile::euclidean(2)), WeightedModel(RadialProfile::euclidean(3)),
                            WeightedModel(RadialProfile::hyperbolic(2)), WeightedModel(RadialProfile::exp_alpha(0.5, 2))};
    for (const WeightedModel& m : ends) {
        double far = capacity_annulus(m, 1.0, 1e4).capacity;
        bool parabolic = classify_parabolicity(m, End::plus) == Parabolicity::parabolic;
        CHECK((far < 0.2) == parabolic);
    }
}

TEST_CASE("radial harmonic examples") {
    RadialHarmonic u = radial_harmonic(flat(), 0.0, 1.0, 0.0);
    for (double r : {0.0, 1.5, 9.0}) CHECK(u(r) == doctest::Approx(r).epsilon(1e-10));
    WeightedModel e1(RadialProfile::exp_alpha(1.0, 2, 0.0));
    RadialHarmonic w = radial_harmonic(e1, 0.0, 1.0, 1.0);
    CHECK(std::fabs(w(20.0) / std::exp(20.0) - 1.0) < 1e-2);
    CHECK(w(5.0) == doctest::Approx(std::exp(5.0) - std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("radial harmonic residual is small and second order") {
    WeightedModel models[] = {WeightedModel(RadialProfile::euclidean(2)), WeightedModel(RadialProfile::hyperbolic(2)),
                              WeightedModel(RadialProfile::exp_alpha(0.5, 2)), WeightedModel(RadialProfile::rlogr())};
    for (const WeightedModel& m : models) {
        RadialHarmonic u = radial_harmonic(m, 0.0, 1.0, 2.0);
        CHECK(harmonic_residual(m, u, 2.0, 8.0, 4096) <= 1e-4);
        // Above the quadrature noise floor the residual halves twice per refinement.
        double coarse = harmonic_residual(m, u, 2.0, 8.0, 1024);
        double fine = harmonic_residual(m, u, 2.0, 8.0, 2048);
        CHECK(std::log2(coarse / fine) == doctest::Approx(2.0).epsilon(0.15));
    }
}

TEST_CASE("parabolicity examples") {
    CHECK(classify_parabolicity(WeightedModel(RadialProfile::exp_alpha(0.5, 2)), End::plus) == Parabolicity::parabolic);
    CHECK(classify_parabolicity(flat(), End::plus) == Parabolicity::parabolic);
    CHECK(classify_parabolicity(WeightedModel(RadialProfile::euclidean(2)), End::plus) == Parabolicity::parabolic);
    CHECK(classify_parabolicity(WeightedModel(RadialProfile::hyperbolic(2)), End::plus) == Parabolicity::nonparabolic);
    // Growing area toward the minus end of a full line.
    auto grow = std::make_shared<FunctionWeight>([](double r) { return Jet{-0.5 * r, -0.5, 0.0}; });
    WeightedModel line(RadialProfile::power(0.0, 2).on_full_line(), grow);
    CHECK(classify_parabolicity(line, End::minus) == Parabolicity::nonparabolic);
    CHECK(classify_parabolicity(line, End::plus) == Parabolicity::parabolic);
    CHECK_THROWS_AS(classify_parabolicity(flat(), End::minus), ArgumentError);
}

TEST_CASE("ricci curvature in two dimensions") {
    WeightedModel e(RadialProfile::euclidean(2)), h(RadialProfile::hyperbolic(2));
    WeightedModel x(RadialProfile::exp_alpha(0.5, 2));
    for (double r = 0.6; r < 30.0; r += 0.77) {
        CHECK(std::fabs(ricci_radial(e, r)) < 1e-12);
        CHECK(ricci_radial(h, r) == doctest::Approx(-1.0).epsilon(1e-10));
        double a = 0.5;
        double expect = a * (a - 1.0) * std::pow(r, a - 2.0) - a * a * std::pow(r, 2.0 * a - 2.0);
        CHECK(ricci_radial(x, r) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(std::fabs(ricci_radial(x, 1e6)) < 1e-3);
    CHECK_THROWS_AS(ricci_radial(WeightedModel(RadialProfile::euclidean(3)), 1.0), UnsupportedError);
}

TEST_CASE("spherical Harnack premises") {
    HarnackPremises a = check_spherical_harnack_premises(WeightedModel(RadialProfile::rlogr()), 2.0, 10.0, 1e4);
    CHECK(a.pass);
    CHECK(a.N_estimate <= 2.0);
    CHECK(check_spherical_harnack_premises(WeightedModel(RadialProfile::exp_alpha(0.5, 2)), 2.0, 10.0, 1e3).pass);
    HarnackPremises f = check_spherical_harnack_premises(flat(), 2.0, 10.0, 100.0);
    CHECK(f.pass);
    CHECK(f.ratio_bound == 1.0);
    CHECK(f.N_estimate < 0.05);
    CHECK_THROWS_AS(check_spherical_harnack_premises(flat(), 2.0, 0.5, 100.0), ArgumentError);
}

TEST_CASE("volume growth exponent") {
    CHECK(fit_volume_exponent(WeightedModel(RadialProfile::euclidean(3)), 10.0, 1000.0) ==
          doctest::Approx(3.0).epsilon(0.01 / 3.0));
    CHECK(fit_volume_exponent(WeightedModel(RadialProfile::euclidean(2)), 10.0, 1000.0) ==
          doctest::Approx(2.0).epsilon(0.005));
    WeightedModel e1(RadialProfile::exp_alpha(1.0, 2));
    CHECK(std::fabs(fit_volume_exponent(e1, 50.0, 600.0)) < 1e-3);
    TailResult tail = tail_integral([&](double r) { return e1.area_tilde(r); }, 0.0, 1, 1e-10);
    CHECK(tail.converged);
}
