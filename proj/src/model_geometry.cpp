#include "heatlab/model_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatlab/errors.hpp"

namespace heatlab {

WeightedModel::WeightedModel(RadialProfile profile) : profile_(std::move(profile)) {}

WeightedModel::WeightedModel(RadialProfile profile, std::shared_ptr<const RadialWeight> weight)
    : profile_(std::move(profile)), weight_(std::move(weight)) {}

Domain WeightedModel::domain() const { return view_ ? Domain::half_line : profile_.domain(); }

double WeightedModel::r_min() const {
    if (view_) return 0.0;
    double lo = profile_.r_min();
    return weight_ ? std::max(lo, weight_->r_min()) : lo;
}

double WeightedModel::r_max() const {
    double lo = profile_.r_min(), hi = profile_.r_max();
    if (weight_) {
        lo = std::max(lo, weight_->r_min());
        hi = std::min(hi, weight_->r_max());
    }
    if (!view_) return hi;
    return orientation_ > 0 ? hi - origin_ : origin_ - lo;
}

double WeightedModel::h(double s) const { return weight_ ? weight_->h(to_model(s)) : 1.0; }

Jet WeightedModel::log_area(double s) const { return orient(profile_.log_area(to_model(s))); }

Jet WeightedModel::area(double s) const { return orient(profile_.area(to_model(s))); }

Jet WeightedModel::log_area_tilde(double s) const {
    double r = to_model(s);
    Jet l = profile_.log_area(r);
    if (weight_) {
        Jet w = weight_->log_h(r);
        l.f += 2.0 * w.f;
        l.d1 += 2.0 * w.d1;
        l.d2 += 2.0 * w.d2;
    }
    return orient(l);
}

double WeightedModel::area_tilde(double s) const {
    if (!weight_) return profile_.area(to_model(s)).f;
    return std::exp(log_area_tilde(s).f);
}

WeightedModel WeightedModel::view(double origin, int orientation) const {
    if (orientation != 1 && orientation != -1) throw ArgumentError("view orientation must be +1 or -1");
    WeightedModel out(*this);
    out.origin_ = to_model(origin);
    out.orientation_ = orientation_ * orientation;
    out.view_ = true;
    return out;
}

// ---------------------------------------------------------------------------

VolumeTable::VolumeTable(const WeightedModel& model, double v_max, double s_max) {
    double s = model.r_min();
    if (!std::isfinite(s)) throw ArgumentError("VolumeTable needs a model with a finite left end");
    double s_stop = std::min(s_max, model.r_max());
    QuadOptions q{1e-11, 1e-300, 48};
    auto St = [&](double x) { return model.area_tilde(x); };
    s_.push_back(s);
    V_.push_back(0.0);
    A_.push_back(St(s));
    const std::size_t max_nodes = 2000000;
    while (V_.back() < v_max && s < s_stop && s_.size() < max_nodes) {
        double slope = std::fabs(model.log_area_tilde(s).d1);
        double dmax = 0.25 + 0.05 * std::fabs(s - s_.front());
        double ds = std::isfinite(slope) && slope > 0.0 ? std::clamp(0.05 / slope, 1e-3, dmax) : 1e-3;
        if (!std::isfinite(slope)) ds = 1e-3;
        else if (slope == 0.0) ds = dmax;
        double next = std::min(s + ds, s_stop);
        double a_next = St(next);
        if (!std::isfinite(a_next)) break;
        double seg = adaptive_simpson(St, s, next, q);
        double v = V_.back() + seg;
        if (!std::isfinite(v)) break;
        s = next;
        s_.push_back(s);
        V_.push_back(v);
        A_.push_back(a_next);
    }
    if (s_.size() < 2) throw NumericFailure("VolumeTable: could not tabulate any volume");
}

double VolumeTable::hermite(std::size_t k, double s) const {
    double h = s_[k + 1] - s_[k];
    double t = (s - s_[k]) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * V_[k] + (t3 - 2 * t2 + t) * h * A_[k] + (-2 * t3 + 3 * t2) * V_[k + 1] +
           (t3 - t2) * h * A_[k + 1];
}

double VolumeTable::volume(double s) const {
    if (s < s_.front() || s > s_.back())
        throw RangeError("VolumeTable: s=" + std::to_string(s) + " outside tabulated range");
    if (s == s_.back()) return V_.back();
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
    return hermite(k, s);
}

double VolumeTable::inverse(double v) const {
    if (v < 0.0 || v > V_.back())
        throw RangeError("VolumeTable: volume " + std::to_string(v) + " outside tabulated range");
    if (v == V_.back()) return s_.back();
    auto it = std::upper_bound(V_.begin(), V_.end(), v);
    std::size_t k = static_cast<std::size_t>(it - V_.begin()) - 1;
    if (k + 1 >= s_.size()) k = s_.size() - 2;
    double lo = s_[k], hi = s_[k + 1];
    double dV = V_[k + 1] - V_[k];
    double x = dV > 0 ? lo + (v - V_[k]) / dV * (hi - lo) : lo;
    // Safeguarded Newton on the monotone cubic.
    for (int it2 = 0; it2 < 60; ++it2) {
        double f = hermite(k, x) - v;
        if (f > 0) hi = x; else lo = x;
        double h = s_[k + 1] - s_[k];
        double t = (x - s_[k]) / h;
        double d = ((6 * t * t - 6 * t) * V_[k] + (3 * t * t - 4 * t + 1) * h * A_[k] +
                    (-6 * t * t + 6 * t) * V_[k + 1] + (3 * t * t - 2 * t) * h * A_[k + 1]) / h;
        double nx = d > 0 ? x - f / d : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::fabs(nx - x) <= 1e-15 * std::max(1.0, std::fabs(x))) {
            x = nx;
            break;
        }
        x = nx;
    }
    return x;
}

// ---------------------------------------------------------------------------

namespace {

void require_in_domain(const WeightedModel& m, double r, const char* what) {
    if (!(r >= m.r_min() && r <= m.r_max()))
        throw RangeError(std::string(what) + ": r=" + std::to_string(r) + " outside the model domain");
}

}  // namespace

double volume(const WeightedModel& model, double R) {
    require_in_domain(model, R, "volume");
    double from = model.domain() == Domain::full_line ? 0.0 : model.r_min();
    return adaptive_simpson([&](double x) { return model.area_tilde(x); }, from, R);
}

CapacityResult capacity_annulus(const WeightedModel& model, double a, double b) {
    if (!(a < b)) throw ArgumentError("capacity_annulus: need a < b");
    require_in_domain(model, a, "capacity_annulus");
    require_in_domain(model, b, "capacity_annulus");
    auto inv = [model](double x) { return 1.0 / model.area_tilde(x); };
    double R = adaptive_simpson(inv, a, b);
    if (!(R > 0.0) || !std::isfinite(R)) throw NumericFailure("capacity_annulus: divergent integral");
    CapacityResult out;
    out.resistance = R;
    out.capacity = 1.0 / R;
    out.potential = [inv, a, b, R](double r) {
        if (r <= a) return 1.0;
        if (r >= b) return 0.0;
        return adaptive_simpson(inv, r, b) / R;
    };
    return out;
}

RadialHarmonic::RadialHarmonic(WeightedModel model, double c1, double c2, double r1)
    : model_(std::move(model)), c1_(c1), c2_(c2), r1_(r1) {
    require_in_domain(model_, r1, "radial_harmonic");
    double s = model_.area_tilde(r1);
    if (!(s > 0.0) || !std::isfinite(1.0 / s))
        throw ArgumentError("radial_harmonic: integral of 1/S~ diverges at r1=" + std::to_string(r1));
}

double RadialHarmonic::increment(double a, double b) const {
    QuadOptions q{1e-13, 1e-300, 48};
    return c2_ * adaptive_simpson([this](double x) { return 1.0 / model_.area_tilde(x); }, a, b, q);
}

double RadialHarmonic::operator()(double r) const { return c1_ + increment(r1_, r); }

double RadialHarmonic::derivative(double r) const { return c2_ / model_.area_tilde(r); }

RadialHarmonic radial_harmonic(const WeightedModel& model, double c1, double c2, double r1) {
    return RadialHarmonic(model, c1, c2, r1);
}

double harmonic_residual(const WeightedModel& model, const RadialHarmonic& u, double a, double b, int nodes) {
    if (nodes < 3 || !(a < b)) throw ArgumentError("harmonic_residual: need a < b and >= 3 nodes");
    double dr = (b - a) / (nodes - 1);
    std::vector<double> flux(nodes - 1);
    for (int i = 0; i + 1 < nodes; ++i) {
        double x0 = a + i * dr, x1 = a + (i + 1) * dr;
        flux[i] = model.area_tilde(0.5 * (x0 + x1)) * u.increment(x0, x1);
    }
    double worst = 0.0;
    double scale = std::fabs(u.c2()) * dr * dr;
    for (int i = 1; i + 1 < nodes; ++i) worst = std::max(worst, std::fabs(flux[i] - flux[i - 1]) / scale);
    return worst;
}

const char* to_string(Parabolicity p) { return p == Parabolicity::parabolic ? "parabolic" : "nonparabolic"; }

ParabolicityReport parabolicity_report(const WeightedModel& model, End end) {
    int dir = end == End::plus ? 1 : -1;
    double start;
    if (end == End::minus) {
        if (model.domain() != Domain::full_line)
            throw ArgumentError("classify_parabolicity: half-line model has no minus end");
        start = std::min(-1.0, model.r_max());
    } else {
        start = std::max(1.0, model.r_min() + 1.0);
        if (model.domain() == Domain::full_line) start = 1.0;
    }
    auto inv = [&](double x) {
        if (x < model.r_min() || x > model.r_max())
            throw NumericFailure("parabolicity: tail integral left the model domain");
        return 1.0 / model.area_tilde(x);
    };
    TailResult t = tail_integral(inv, start, dir, 1e-6, 1.0, 60);
    ParabolicityReport out;
    out.tail = t.value;
    out.reach = t.reach;
    out.kind = t.converged && std::isfinite(t.value) ? Parabolicity::nonparabolic : Parabolicity::parabolic;
    return out;
}

Parabolicity classify_parabolicity(const WeightedModel& model, End end) {
    return parabolicity_report(model, end).kind;
}

double ricci_radial(const WeightedModel& model, double r) {
    if (model.dim() != 2) throw UnsupportedError("ricci_radial: curvature formula is two-dimensional only");
    Jet l = model.log_area(r);
    // -S''/S = -(l'' + l'^2) with l = log S; stable where S itself under/overflows.
    return -(l.d2 + l.d1 * l.d1);
}

HarnackPremises check_spherical_harnack_premises(const WeightedModel& model, double A, double r_lo,
                                                 double r_hi) {
    if (model.dim() != 2) throw UnsupportedError("spherical Harnack premises are two-dimensional only");
    if (!(A > 1.0)) throw ArgumentError("spherical Harnack premises: need A > 1");
    if (!(r_lo > 1.0) || !(r_hi > r_lo)) throw ArgumentError("spherical Harnack premises: r_range must lie in (1, inf)");
    auto q = [&](double t) {
        Jet l = model.log_area(t);
        return std::max(0.0, l.d2 + l.d1 * l.d1);  // S''_+ / S
    };
    const int ns = 64, nt = 64;
    HarnackPremises out;
    for (int i = 0; i < ns; ++i) {
        double r = r_lo * std::pow(r_hi / r_lo, double(i) / (ns - 1));
        double qr = q(r);
        double sup = 0.0;
        for (int j = 1; j <= nt; ++j) {
            double t = (r / A) * std::pow(A * A, double(j) / (nt + 1));
            if (t < model.r_min() || t > model.r_max()) continue;
            sup = std::max(sup, q(t));
        }
        double ratio = (sup == 0.0 && qr == 0.0) ? 1.0 : (qr == 0.0 ? INFINITY : sup / qr);
        out.ratio_bound = std::max(out.ratio_bound, ratio);
        double S = model.area(r).f;
        double est = (S / r + std::sqrt(qr) * S) / std::log(r);
        out.N_estimate = std::max(out.N_estimate, est);
    }
    out.pass = std::isfinite(out.ratio_bound) && std::isfinite(out.N_estimate);
    return out;
}

double fit_volume_exponent(const WeightedModel& model, double r_lo, double r_hi) {
    if (!(r_lo > 0.0) || !(r_hi >= 10.0 * r_lo))
        throw ArgumentError("fit_volume_exponent: r_range must be positive and span a decade");
    const int ns = 48;
    double from = model.domain() == Domain::full_line ? 0.0 : model.r_min();
    auto St = [&](double x) { return model.area_tilde(x); };
    double V = adaptive_simpson(St, from, r_lo);
    double prev = r_lo;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < ns; ++i) {
        double r = r_lo * std::pow(r_hi / r_lo, double(i) / (ns - 1));
        V += adaptive_simpson(St, prev, r);
        prev = r;
        if (!std::isfinite(V) || !(V > 0.0)) throw NumericFailure("fit_volume_exponent: volume not finite/positive");
        double x = std::log(r), y = std::log(V);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (ns * sxy - sx * sy) / (ns * sxx - sx * sx);
}

}  // namespace heatlab
