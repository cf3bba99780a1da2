#include <algorithm>
#include <cmath>

#include "heatlab/errors.hpp"
#include "heatlab/h_transform.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const PreconditionError& e) {
        throw PreconditionError(std::string("stage ") + name + ": " + e.what());
    } catch (const NumericFailure& e) {
        throw NumericFailure(std::string("stage ") + name + ": " + e.what());
    } catch (const RangeError& e) {
        throw RangeError(std::string("stage ") + name + ": " + e.what());
    }
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, n > 1 ? double(i) / (n - 1) : 0.0);
    return v;
}

}  // namespace

double find_waist(const WeightedModel& T) {
    double best = 0.0, bv = INFINITY;
    for (int i = -500; i <= 500; ++i) {
        double r = 0.01 * i;
        double v = T.log_area_tilde(r).f;
        if (v < bv) bv = v, best = r;
    }
    double a = best - 0.01, b = best + 0.01;
    if (!(T.log_area_tilde(a).d1 < 0.0 && T.log_area_tilde(b).d1 > 0.0)) return best;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        double m = 0.5 * (a + b);
        if (T.log_area_tilde(m).d1 < 0.0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

TwoEndSetup prepare_two_end(double alpha, int n, const RadialProfile& minus_profile, const PipelineOptions& opt) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("two-end setup: alpha must lie in (0,1]");
    RadialProfile plus = RadialProfile::exp_alpha(alpha, n, opt.cap_radius);
    WeightedModel model(RadialProfile::two_end(plus, minus_profile, opt.join));
    TransformPair pair = stage("build_two_end_weight", [&] { return build_two_end_weight(model); });
    const WeightedModel& T = pair.transformed;
    double waist = find_waist(T);
    TwoEndSetup s{T, T.view(waist, +1), T.view(waist, -1), 0.0, 0.0, 0.0, 0.0, 0.0, {}, {}, {}, {}};
    s.kappa1 = pair.kappa1;
    s.kappa2 = pair.kappa2;
    s.waist = waist;
    s.h_ref = pair.h(waist);
    s.J_nu = stage("profile_halfline", [&] { return profile_halfline(s.plus_view); });
    IsoProfile J_minus_raw = stage("profile_halfline", [&] { return profile_halfline(s.minus_view); });

    IsoProfile closed = asymptotic_profile(alpha, n, 1.0);
    s.c_tilde = profile_ratio_min(s.J_nu, closed, opt.calib_v_lo, std::min(opt.calib_v_hi, s.J_nu.v_max));
    IsoProfile J_plus = asymptotic_profile(alpha, n, s.c_tilde);
    IsoProfile J_minus = ratio_envelope(J_minus_raw, 1e-8, std::min(1e28, J_minus_raw.v_max));

    s.fk_plus = stage("fk_from_iso", [&] { return fk_from_iso(J_plus); });
    s.fk_minus = stage("fk_from_iso", [&] { return fk_from_iso(J_minus); });
    stage("minus-end FK", [&] {
        for (double v : log_grid(1e3, 1e8, 41))
            if (s.fk_minus(v) < s.fk_plus(v))
                throw PreconditionError("minus end falls below the log-type Faber-Krahn floor at v=" +
                                        std::to_string(v));
        return 0;
    });
    s.fk = stage("fk_connected_sum", [&] { return fk_connected_sum({s.fk_plus, s.fk_minus}, opt.fk_c, opt.fk_Q); });
    return s;
}

PipelineResult run_two_end_pipeline(double alpha, int n, const RadialProfile& minus_profile,
                                    const std::vector<double>& times, const PipelineOptions& opt) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("pipeline: alpha must lie in (0,1]");
    if (times.size() < 4) throw ArgumentError("pipeline: need at least 4 times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ArgumentError("pipeline: times must increase");

    TwoEndSetup s = prepare_two_end(alpha, n, minus_profile, opt);
    const WeightedModel& T = s.transformed;
    const WeightedModel& Tp = s.plus_view;
    const IsoProfile& J_nu = s.J_nu;
    const FaberKrahnFunction& L = s.fk;
    IsoProfile closed = asymptotic_profile(alpha, n, 1.0);
    PipelineResult res;
    res.alpha = alpha;
    res.n = n;
    res.kappa1 = s.kappa1;
    res.kappa2 = s.kappa2;
    res.waist = s.waist;
    res.h_ref = s.h_ref;
    res.c_tilde = s.c_tilde;
    const double h2 = res.h_ref * res.h_ref;

    BoundsReport& rep = res.bounds;
    rep.times = times;
    std::vector<double> upper_raw, lower_raw;
    stage("heat_upper_bound", [&] {
        for (double t : times) upper_raw.push_back(h2 * heat_upper_bound(L, t));
        return 0;
    });
    stage("heat_lower_bound", [&] {
        LowerBoundOptions lo;
        lo.alpha_seed = alpha;
        HeatLowerBound lb(Tp, lo);
        for (double t : times) lower_raw.push_back(h2 * lb(t));
        return 0;
    });

    stage("heat_solver", [&] {
        GridSpec g;
        g.r_min = opt.grid_r_min;
        g.r_max = opt.grid_r_max > 0.0 ? opt.grid_r_max : (alpha >= 1.0 ? 120.0 : 400.0);
        g.nodes = opt.nodes;
        g.dt = opt.dt;
        g.far_bc = BoundaryCondition::dirichlet;
        std::vector<double> r = grid_nodes(g);
        std::vector<int> src;
        for (int i = 0; i < static_cast<int>(r.size()); ++i)
            if (r[i] >= res.waist + opt.source_lo && r[i] <= res.waist + opt.source_hi) src.push_back(i);
        std::vector<int> strided;
        for (std::size_t i = 0; i < src.size(); i += std::max(1, opt.source_stride)) strided.push_back(src[i]);
        if (strided.empty()) throw ArgumentError("pipeline: empty source window");
        KernelOptions ko;
        ko.parallel = opt.parallel;
        KernelDiag kd = kernel_diag(T, g, BoundaryCondition::dirichlet, times, strided, ko);
        for (double t : times) {
            rep.numeric.push_back(h2 * sup_diag(kd, t));
            res.sup_radius.push_back(kd.r[kd.sources[sup_diag_source(kd, t)]]);
        }
        double min_mass = 1.0;
        for (double m : kd.mass) min_mass = std::min(min_mass, m);
        res.max_leakage = 1.0 - min_mass;
        res.clamp_count = kd.clamp_count;
        return 0;
    });

    std::size_t a = 0;
    if (opt.anchor_time > 0.0) {
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::fabs(std::log(times[i] / opt.anchor_time)) < std::fabs(std::log(times[a] / opt.anchor_time))) a = i;
    }
    res.anchor_time = times[a];
    res.upper_calibration = rep.numeric[a] / upper_raw[a];
    res.lower_calibration = rep.numeric[a] / lower_raw[a];
    res.ordering_ok = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        rep.upper.push_back(res.upper_calibration * upper_raw[i]);
        rep.lower.push_back(res.lower_calibration * lower_raw[i]);
        if (rep.lower[i] > rep.numeric[i] * (1.0 + 1e-9) || rep.numeric[i] > rep.upper[i] * (1.0 + 1e-9))
            res.ordering_ok = false;
    }

    DecayFit fu = fit_decay(times, rep.upper, false);
    rep.fitted_exponent = fu.beta;
    rep.upper_polynomial = fu.polynomial;
    try {
        DecayFit fn = fit_decay(times, rep.numeric, true);
        rep.numeric_exponent = fn.beta;
        rep.numeric_polynomial = fn.polynomial;
    } catch (const ArgumentError&) {
        rep.numeric_exponent = NAN;
    }
    try {
        rep.lower_exponent = fit_decay(times, rep.lower, true).beta;
    } catch (const ArgumentError&) {
        rep.lower_exponent = NAN;
    }

    IsoProfile env = ratio_envelope(J_nu, 1e-8, std::min(1e28, J_nu.v_max));
    VolumeTable vt(Tp, 1e30, opt.eigen_R_hi * 1.01);
    for (double R : log_grid(opt.eigen_R_lo, opt.eigen_R_hi, opt.eigen_samples)) {
        EigenRow row;
        row.R = R;
        row.lambda1 = lambda1_dirichlet(Tp, R, BoundaryCondition::neumann);
        row.rayleigh_upper = lambda1_rayleigh_upper(Tp, R);
        double V = vt.volume(R);
        double q = env(V) / V;
        row.fk_floor = 0.25 * q * q;
        res.eigen.push_back(row);
    }

    IsoProfile warped = warped_product_profile(env, profile_sphere(n), 1.0, 1.0);
    for (double v : log_grid(opt.iso_v_lo, opt.iso_v_hi, opt.iso_samples))
        res.iso.push_back({v, J_nu(v), warped(v), closed(v)});
    return res;
}

BoundsReport two_end_pipeline(double alpha, int n, const RadialProfile& minus_profile,
                              const std::vector<double>& times, const PipelineOptions& opt) {
    return run_two_end_pipeline(alpha, n, minus_profile, times, opt).bounds;
}

}  // namespace heatlab
