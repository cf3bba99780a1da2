#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatlab/heat_solver.hpp"
#include "heatlab/isoperimetry.hpp"
#include "heatlab/model_geometry.hpp"

namespace heatlab {

struct FaberKrahnFunction {
    std::function<double(double)> Lambda;
    bool nonincreasing = false;
    bool integrable_at_zero = false;

    double operator()(double v) const { return Lambda(v); }
};

// Numerical test of the convergence of integral_0^1 dv / (v Lambda(v)).
bool integrable_at_zero(const std::function<double(double)>& Lambda);

// Lambda(v) = (J(v)/v)^2 / 4.
FaberKrahnFunction fk_from_iso(const IsoProfile& J);
// Lambda(v) = c * min_i Lambda_i(Q v).
FaberKrahnFunction fk_connected_sum(const std::vector<FaberKrahnFunction>& parts, double c, double Q);

// gamma(t) solving t = integral_0^gamma dv / (v Lambda(v)).
double gamma_inverse(const FaberKrahnFunction& fk, double t);
// 4 / gamma(t/2).
double heat_upper_bound(const FaberKrahnFunction& fk, double t);

// Smallest eigenvalue of -(1/S~)(S~ u')' on (r_min, R) in view coordinates,
// Dirichlet at R, from Sturm bisection on two grids and Richardson extrapolation.
double lambda1_dirichlet(const WeightedModel& model, double R, BoundaryCondition left_bc, int nodes = 1024);
// 4 (S~(R) / V~(R))^2.
double lambda1_rayleigh_upper(const WeightedModel& model, double R);
// (c / rho^2) min((V0/muU)^2, (V0/muU)^{2/n}).
double lambda1_lower_locally_harnack(double c, double rho, double V0, double n, double muU);

struct LowerBoundOptions {
    double alpha_seed = 0.0;  // > 0: grid centred at R = t^{1/(2-alpha)}
    bool use_eigensolver = false;
    double v_max = 1e30;
};

// sup over R of exp(-lambda1(R) t) / V~(R) on a half-line model.
class HeatLowerBound {
public:
    HeatLowerBound(const WeightedModel& model, const LowerBoundOptions& opt = {});
    double operator()(double t) const;
    double best_radius(double t) const;

private:
    double log_value(double R, double t) const;
    WeightedModel model_;
    LowerBoundOptions opt_;
    std::shared_ptr<VolumeTable> table_;
};

double heat_lower_bound(const WeightedModel& model, double t, const LowerBoundOptions& opt = {});

// c_x / (t log t)^{N/2}. The locally Harnack polynomial exponent of the form
// beta = 2 max(N + theta, (N + theta)/n) is left to the caller.
double log_lower_bound(double N, double c_x, double t);

struct DecayFit {
    double beta = 0.0;
    double log_scale = 0.0;  // a in log v = a - p log t - c t^beta
    double rate = 0.0;       // c
    double power = 0.0;      // p, zero unless the prefactor term is fitted
    bool polynomial = false;
    double rss = 0.0;
};

// Least-squares fit of log v = a - c t^beta (optionally - p log t) over beta.
// Values must be positive and strictly decreasing over at least 1.5 decades.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, bool prefactor = false);
double fit_decay_exponent(const std::vector<double>& times, const std::vector<double>& values,
                          bool prefactor = false);

struct BoundsReport {
    std::vector<double> times;
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> numeric;
    double fitted_exponent = 0.0;  // of the upper bound
    double numeric_exponent = 0.0;
    double lower_exponent = 0.0;
    bool upper_polynomial = false;
    bool numeric_polynomial = false;
};

void write_bounds_csv(const std::string& path, const BoundsReport& rep);

struct EigenRow {
    double R, lambda1, rayleigh_upper, fk_floor;
};

void write_eigen_csv(const std::string& path, const std::vector<EigenRow>& rows);

struct PipelineOptions {
    double join = 1.0;
    double cap_radius = 0.5;
    double grid_r_min = -40.0;
    double grid_r_max = 0.0;  // 0: 120 for alpha = 1, 400 otherwise
    int nodes = 3000;
    double dt = 0.1;
    double source_lo = -1.0;  // source window relative to the waist
    double source_hi = 10.0;
    int source_stride = 2;
    double fk_c = 1.0;
    double fk_Q = 1.05;
    double calib_v_lo = 1e-6;
    double calib_v_hi = 1e12;
    double anchor_time = 0.0;  // 0: first reported time
    bool parallel = true;
    int eigen_samples = 20;
    double eigen_R_lo = 1.0;
    double eigen_R_hi = 60.0;
    int iso_samples = 61;
    double iso_v_lo = 1e-2;
    double iso_v_hi = 1e8;
};

struct PipelineResult {
    BoundsReport bounds;
    double alpha = 0.0;
    int n = 2;
    double kappa1 = 0.0, kappa2 = 0.0;
    double waist = 0.0;
    double h_ref = 0.0;
    double c_tilde = 0.0;
    double upper_calibration = 1.0;
    double lower_calibration = 1.0;
    double anchor_time = 0.0;
    bool ordering_ok = false;
    double max_leakage = 0.0;
    double symmetry_error = 0.0;
    int clamp_count = 0;
    std::vector<double> sup_radius;  // model radius of the sup-diagonal node at each time
    std::vector<EigenRow> eigen;
    std::vector<IsoRow> iso;
};

// Argmin of S~ on [-5, 5] (the waist of a transformed two-end model).
double find_waist(const WeightedModel& T);

// Transformed two-end model and its glued Faber-Krahn function: plus end from
// c~ times the closed-form profile (c~ = min J_nu / closed form over the
// calibration range), minus end from the ratio envelope of its half-line profile.
struct TwoEndSetup {
    WeightedModel transformed;
    WeightedModel plus_view;
    WeightedModel minus_view;
    double kappa1 = 0.0, kappa2 = 0.0;
    double waist = 0.0;
    double h_ref = 0.0;
    double c_tilde = 0.0;
    IsoProfile J_nu;  // plus view from the waist
    FaberKrahnFunction fk_plus, fk_minus, fk;
};

TwoEndSetup prepare_two_end(double alpha, int n, const RadialProfile& minus_profile, const PipelineOptions& opt = {});

// Two-end model with an exp_alpha plus end and the given minus end; errors
// carry the failing stage in their message.
PipelineResult run_two_end_pipeline(double alpha, int n, const RadialProfile& minus_profile,
                                    const std::vector<double>& times, const PipelineOptions& opt = {});
BoundsReport two_end_pipeline(double alpha, int n, const RadialProfile& minus_profile,
                              const std::vector<double>& times, const PipelineOptions& opt = {});

}  // namespace heatlab
