#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "heatlab/model_geometry.hpp"
#include "heatlab/monotone_tab.hpp"

namespace heatlab {

// Lower isoperimetric function J on (0, total_mass); v_max bounds the
// volumes where a tabulated J can be evaluated.
struct IsoProfile {
    std::function<double(double)> J;
    double total_mass = INFINITY;
    bool j_over_v_nonincreasing = false;
    bool continuous = true;
    double v_max = INFINITY;

    double operator()(double v) const { return J(v); }
};

struct InversePair {
    MonotoneTab phi;
    MonotoneTab phi_star;
    double common_integral = 0.0;
};

// phi*(s) = sup{t > 0 : phi(t) > s}, sup of the empty set = 0. Step inputs
// are inverted exactly; linear inputs must be strictly decreasing.
InversePair generalized_inverse(const MonotoneTab& phi);

// J_nu = S~ o V~^{-1} for a half-line model with nondecreasing S~.
IsoProfile profile_halfline(const WeightedModel& model, double v_max = 1e30);

// Checks J(v)/v nonincreasing on `samples` log-spaced pairs in [v_lo, v_hi].
bool ratio_nonincreasing(const IsoProfile& J, double v_lo, double v_hi, int samples = 1000);

// v * min_{u <= v} J(u)/u, running minimum taken on a log grid over [v_lo, v_hi]
// (J itself below v_lo, the last ratio held above v_hi).
IsoProfile ratio_envelope(const IsoProfile& J, double v_lo, double v_hi, int samples = 4000);

IsoProfile profile_sphere(int n, double c_n = 1.0);

using PositiveFn = std::function<double(double)>;

// inf over xy = v, 0 < y <= P/2 of f(x) y + g(y) x.
double h0_inf(const PositiveFn& f, const PositiveFn& g, double P, double v, double x_max = INFINITY,
              bool validate = true);
double functional_lower_bound(const PositiveFn& f, const PositiveFn& g, double P, double v,
                              double x_max = INFINITY, bool validate = true);
// Throws PreconditionError naming the failing sample when the monotonicity
// hypotheses on f (over (0, x_max)) or g (over (0, P/2]) fail.
void validate_lemma_hypotheses(const PositiveFn& f, const PositiveFn& g, double P, double x_max = INFINITY);

// integral f(phi) + integral g(phi*) for the step function phi = a_j on
// [t_{j-1}, t_j), a_1 > ... > a_k > 0, t_0 = 0.
double lemma_functional(const PositiveFn& f, const PositiveFn& g, const std::vector<double>& a,
                        const std::vector<double>& t);

IsoProfile warped_product_profile(const IsoProfile& J1, const IsoProfile& J2, double mu2_total, double C0);

// c~ w / (log w)^{(1-alpha)/alpha} for w >= 2, c~ c' w^{(n-1)/n} below,
// with c' making J continuous at w = 2.
IsoProfile asymptotic_profile(double alpha, int n, double c_tilde);

// min over log-spaced v in [v_lo, v_hi] of J(v) / K(v).
double profile_ratio_min(const IsoProfile& J, const IsoProfile& K, double v_lo, double v_hi, int samples = 800);

struct IsoRow {
    double v, J_nu, J_warped, J_asymptotic;
};

void write_iso_csv(const std::string& path, const std::vector<IsoRow>& rows);

}  // namespace heatlab
