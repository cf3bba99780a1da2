#include "heatlab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "heatlab/errors.hpp"

namespace heatlab {

InversePair generalized_inverse(const MonotoneTab& phi) {
    const auto& x = phi.x();
    const auto& y = phi.y();
    bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    if (phi.direction() != Direction::nonincreasing && !constant)
        throw ArgumentError("generalized_inverse: input must be nonincreasing");
    for (double v : y)
        if (v < 0.0) throw ArgumentError("generalized_inverse: input must be nonnegative");
    if (x.front() != 0.0) throw ArgumentError("generalized_inverse: input must start at t = 0");

    InversePair out;
    out.phi = phi;
    if (phi.interp() == Interp::step) {
        if (y.back() != 0.0) throw ArgumentError("generalized_inverse: step input must end at 0 (integrable)");
        // Distinct positive heights a_1 > ... > a_k and right ends t_j of their level intervals.
        std::vector<double> a, t;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            if (y[i] == 0.0) break;
            if (!a.empty() && y[i] == a.back()) {
                t.back() = x[i + 1];
            } else {
                a.push_back(y[i]);
                t.push_back(x[i + 1]);
            }
        }
        std::vector<double> xs{0.0}, ys;
        for (std::size_t j = a.size(); j-- > 0;) {
            ys.push_back(t[j]);
            xs.push_back(a[j]);
        }
        ys.push_back(0.0);
        if (a.empty()) xs = {0.0}, ys = {0.0};
        out.phi_star = MonotoneTab(xs, ys, Direction::nonincreasing, Interp::step, Extrapolation::hold);
        // Rectangle sums: sum a_j (t_j - t_{j-1}).
        double total = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            total += a[j] * (t[j] - prev);
            prev = t[j];
        }
        out.common_integral = total;
        return out;
    }
    if (phi.extrapolation() != Extrapolation::zero && y.back() != 0.0)
        throw ArgumentError("generalized_inverse: linear input must vanish beyond its last node");
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] < y[i - 1]))
            throw ArgumentError("generalized_inverse: linear input must be strictly decreasing");
    std::vector<double> xs, ys;
    double tail = y.back();
    if (tail > 0.0) {
        xs.push_back(0.0);
        ys.push_back(x.back());
    }
    for (std::size_t i = y.size(); i-- > 0;) {
        xs.push_back(y[i]);
        ys.push_back(x[i]);
    }
    out.phi_star = MonotoneTab(xs, ys, Direction::nonincreasing, Interp::linear, Extrapolation::zero);
    out.common_integral = phi.integral();
    return out;
}

IsoProfile profile_halfline(const WeightedModel& model, double v_max) {
    if (model.domain() != Domain::half_line) throw ArgumentError("profile_halfline: model must be a half line");
    auto table = std::make_shared<VolumeTable>(model, v_max);
    const auto& A = table->areas();
    const auto& s = table->nodes();
    for (std::size_t k = 1; k < A.size(); ++k)
        if (A[k] < A[k - 1] * (1.0 - 1e-10))
            throw PreconditionError("profile_halfline: S~ is not nondecreasing near s=" + std::to_string(s[k]));
    IsoProfile out;
    WeightedModel m = model;
    out.J = [table, m](double v) {
        if (!(v > 0.0)) throw RangeError("J_nu: volume must be positive");
        return m.area_tilde(table->inverse(v));
    };
    out.total_mass = INFINITY;
    out.v_max = table->v_end();
    double lo = std::max(1e-12, table->volumes()[1] * 1e-3);
    out.j_over_v_nonincreasing = ratio_nonincreasing(out, lo, out.v_max);
    return out;
}

bool ratio_nonincreasing(const IsoProfile& J, double v_lo, double v_hi, int samples) {
    double prev = INFINITY;
    for (int i = 0; i < samples; ++i) {
        double v = i + 1 == samples ? v_hi : v_lo * std::pow(v_hi / v_lo, double(i) / (samples - 1));
        double r = J(v) / v;
        if (r > prev * (1.0 + 1e-7)) return false;
        prev = r;
    }
    return true;
}

IsoProfile ratio_envelope(const IsoProfile& J, double v_lo, double v_hi, int samples) {
    if (!(v_lo > 0.0 && v_hi > v_lo) || samples < 2) throw ArgumentError("ratio_envelope: bad range");
    auto logv = std::make_shared<std::vector<double>>(samples);
    auto m = std::make_shared<std::vector<double>>(samples);
    double run = INFINITY;
    for (int i = 0; i < samples; ++i) {
        double lv = std::log(v_lo) + (std::log(v_hi) - std::log(v_lo)) * i / (samples - 1);
        double v = i == 0 ? v_lo : i + 1 == samples ? v_hi : std::exp(lv);
        run = std::min(run, J(v) / v);
        (*logv)[i] = lv;
        (*m)[i] = std::log(run);
    }
    IsoProfile out;
    auto base = J.J;
    out.J = [logv, m, base](double v) {
        double lv = std::log(v);
        if (lv <= logv->front()) return base(v);
        if (lv >= logv->back()) return v * std::exp(m->back());
        auto it = std::upper_bound(logv->begin(), logv->end(), lv);
        std::size_t k = static_cast<std::size_t>(it - logv->begin()) - 1;
        double w = (lv - (*logv)[k]) / ((*logv)[k + 1] - (*logv)[k]);
        return v * std::exp((*m)[k] + w * ((*m)[k + 1] - (*m)[k]));
    };
    out.total_mass = J.total_mass;
    out.v_max = INFINITY;
    out.continuous = J.continuous;
    out.j_over_v_nonincreasing = ratio_nonincreasing(out, v_lo * 1e-3, v_hi * 10.0);
    return out;
}

IsoProfile profile_sphere(int n, double c_n) {
    if (n < 2) throw ArgumentError("profile_sphere: n must be >= 2");
    if (!(c_n > 0.0)) throw ArgumentError("profile_sphere: c_n must be positive");
    IsoProfile out;
    double e = double(n - 2) / double(n - 1);
    out.J = [c_n, e](double v) {
        if (!(v > 0.0 && v < 1.0)) throw RangeError("J_sigma: volume must lie in (0,1)");
        return c_n * std::pow(std::min(v, 1.0 - v), e);
    };
    out.total_mass = 1.0;
    out.j_over_v_nonincreasing = true;
    out.v_max = 1.0;
    return out;
}

void validate_lemma_hypotheses(const PositiveFn& f, const PositiveFn& g, double P, double x_max) {
    const int ns = 256;
    auto fail = [](const char* what, double at) {
        std::ostringstream os;
        os.precision(6);
        os << "Lemma hypothesis violated: " << what << " at sample " << at;
        throw PreconditionError(os.str());
    };
    double x_hi = std::min(1e8, x_max), x_lo = std::min(1e-8, x_hi * 1e-16);
    double pf = 0.0, pr = INFINITY;
    for (int i = 0; i < ns; ++i) {
        double x = x_lo * std::pow(x_hi / x_lo, double(i) / (ns - 1));
        double fx = f(x);
        if (!(fx > 0.0)) fail("f positive", x);
        if (fx < pf * (1.0 - 1e-9)) fail("f nondecreasing", x);
        if (fx / x > pr * (1.0 + 1e-9)) fail("f(x)/x nonincreasing", x);
        pf = fx;
        pr = fx / x;
    }
    double y_hi = 0.5 * P, y_lo = y_hi * 1e-8;
    double pg = 0.0, pq = INFINITY;
    for (int i = 0; i < ns; ++i) {
        double y = y_lo * std::pow(y_hi / y_lo, double(i) / (ns - 1));
        double gy = g(y);
        if (!(gy > 0.0)) fail("g positive", y);
        if (gy < pg * (1.0 - 1e-9)) fail("g nondecreasing on (0,P/2]", y);
        if (gy / y > pq * (1.0 + 1e-9)) fail("g(y)/y nonincreasing on (0,P/2]", y);
        pg = gy;
        pq = gy / y;
    }
}

double h0_inf(const PositiveFn& f, const PositiveFn& g, double P, double v, double x_max, bool validate) {
    if (!(P > 0.0) || !(v > 0.0)) throw ArgumentError("h0_inf: P and v must be positive");
    if (validate) validate_lemma_hypotheses(f, g, P, x_max);
    auto F = [&](double ly) {
        double y = std::exp(ly);
        return f(v / y) * y + g(y) * (v / y);
    };
    double y_hi = 0.5 * P;
    double y_lo = std::max(y_hi * 1e-14, std::isfinite(x_max) ? v / x_max : 0.0);
    if (y_lo >= y_hi) y_lo = y_hi * (1.0 - 1e-12);
    const int ng = 512;
    double a = std::log(y_lo), b = std::log(y_hi);
    std::vector<double> ly(ng), val(ng);
    int best = 0;
    for (int i = 0; i < ng; ++i) {
        ly[i] = a + (b - a) * i / (ng - 1);
        val[i] = F(ly[i]);
        if (val[i] < val[best]) best = i;
    }
    double lo = ly[std::max(0, best - 1)], hi = ly[std::min(ng - 1, best + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = F(c), fd = F(d);
    for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo); fc = F(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo); fd = F(d);
        }
    }
    return std::min({val[best], fc, fd});
}

double functional_lower_bound(const PositiveFn& f, const PositiveFn& g, double P, double v, double x_max,
                              bool validate) {
    double h0 = h0_inf(f, g, P, v, x_max, validate);
    return std::min(h0 / 6.0, f(v / P) * P / 8.0);
}

double lemma_functional(const PositiveFn& f, const PositiveFn& g, const std::vector<double>& a,
                        const std::vector<double>& t) {
    if (a.size() != t.size() || a.empty()) throw ArgumentError("lemma_functional: heights and ends must match");
    double total = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0.0) || (j > 0 && !(a[j] < a[j - 1])) || !(t[j] > prev))
            throw ArgumentError("lemma_functional: need decreasing positive heights and increasing ends");
        double next = j + 1 < a.size() ? a[j + 1] : 0.0;
        total += f(a[j]) * (t[j] - prev) + g(t[j]) * (a[j] - next);
        prev = t[j];
    }
    return total;
}

IsoProfile warped_product_profile(const IsoProfile& J1, const IsoProfile& J2, double mu2_total, double C0) {
    if (std::isfinite(J1.total_mass)) throw PreconditionError("warped_product_profile: J1 must have infinite total mass");
    if (!(mu2_total > 0.0) || std::fabs(J2.total_mass - mu2_total) > 1e-12 * mu2_total)
        throw PreconditionError("warped_product_profile: J2 total mass must equal mu2_total");
    if (!(C0 > 0.0)) throw ArgumentError("warped_product_profile: C0 must be positive");
    validate_lemma_hypotheses(J1.J, J2.J, mu2_total, J1.v_max);
    double c = 0.5 * std::min(1.0, 1.0 / C0);
    IsoProfile out;
    auto f = J1.J;
    auto g = J2.J;
    double xmax = J1.v_max;
    out.J = [f, g, mu2_total, c, xmax](double v) {
        return c * functional_lower_bound(f, g, mu2_total, v, xmax, false);
    };
    out.total_mass = INFINITY;
    out.v_max = J1.v_max * mu2_total;
    out.continuous = true;
    out.j_over_v_nonincreasing = false;
    return out;
}

IsoProfile asymptotic_profile(double alpha, int n, double c_tilde) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("asymptotic_profile: alpha must lie in (0,1]");
    if (n < 2) throw ArgumentError("asymptotic_profile: n must be >= 2");
    double k = (1.0 - alpha) / alpha;
    double e = double(n - 1) / double(n);
    double cp = 2.0 / (std::pow(std::log(2.0), k) * std::pow(2.0, e));
    IsoProfile out;
    out.J = [=](double w) {
        if (w >= 2.0) return c_tilde * w / std::pow(std::log(w), k);
        return c_tilde * cp * std::pow(w, e);
    };
    out.j_over_v_nonincreasing = true;
    return out;
}

double profile_ratio_min(const IsoProfile& J, const IsoProfile& K, double v_lo, double v_hi, int samples) {
    double best = INFINITY;
    for (int i = 0; i < samples; ++i) {
        double v = i + 1 == samples ? v_hi : v_lo * std::pow(v_hi / v_lo, double(i) / (samples - 1));
        best = std::min(best, J(v) / K(v));
    }
    return best;
}

void write_iso_csv(const std::string& path, const std::vector<IsoRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "v,J_nu,J_warped,J_asymptotic\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.v << ',' << r.J_nu << ',' << r.J_warped << ',' << r.J_asymptotic << '\n';
}

}  // namespace heatlab
