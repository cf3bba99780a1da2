#include "heatlab/h_transform.hpp"

#include <algorithm>
#include <cmath>

#include "heatlab/errors.hpp"

namespace heatlab {

HarmonicWeight::HarmonicWeight(const WeightedModel& base, double kappa1, double kappa2, double r_lo, double r_hi)
    : base_(base), kappa1_(kappa1), kappa2_(kappa2) {
    if (!(r_lo < 1.0 && r_hi > 1.0)) throw ArgumentError("HarmonicWeight: table must straddle r = 1");
    auto inv = [this](double x) { return 1.0 / base_.area_tilde(x); };
    QuadOptions q{1e-12, 1e-300, 48};
    auto spacing = [&](double x) {
        Jet l = base_.log_area_tilde(x);
        double s = std::max(std::fabs(l.d1), std::sqrt(std::fabs(l.d2)));
        return std::clamp(s > 0.0 ? 0.01 / s : 0.5, 1e-3, 0.5);
    };
    std::vector<double> up_r{1.0}, up_I{0.0};
    for (double x = 1.0; x < r_hi;) {
        double nx = std::min(x + spacing(x), r_hi);
        up_I.push_back(up_I.back() + adaptive_simpson(inv, x, nx, q));
        up_r.push_back(nx);
        x = nx;
    }
    std::vector<double> dn_r, dn_I;
    double acc = 0.0;
    for (double x = 1.0; x > r_lo;) {
        double nx = std::max(x - spacing(x), r_lo);
        acc -= adaptive_simpson(inv, nx, x, q);
        dn_r.push_back(nx);
        dn_I.push_back(acc);
        x = nx;
    }
    r_.assign(dn_r.rbegin(), dn_r.rend());
    I_.assign(dn_I.rbegin(), dn_I.rend());
    r_.insert(r_.end(), up_r.begin(), up_r.end());
    I_.insert(I_.end(), up_I.begin(), up_I.end());
    dI_.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) dI_[i] = inv(r_[i]);
    TailResult tail = tail_integral(inv, r_lo, -1, 1e-12, 1.0, 60, q);
    I_minus_inf_ = tail.converged ? I_.front() - tail.value : -INFINITY;
}

double HarmonicWeight::integral_from_one(double r) const {
    if (r < r_.front() || r > r_.back())
        throw RangeError("harmonic weight evaluated outside its table at r=" + std::to_string(r));
    if (r == r_.back()) return I_.back();
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t k = static_cast<std::size_t>(it - r_.begin()) - 1;
    double h = r_[k + 1] - r_[k];
    double t = (r - r_[k]) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * I_[k] + (t3 - 2 * t2 + t) * h * dI_[k] + (-2 * t3 + 3 * t2) * I_[k + 1] +
           (t3 - t2) * h * dI_[k + 1];
}

double HarmonicWeight::h(double r) const { return kappa1_ + kappa2_ * integral_from_one(r); }

Jet HarmonicWeight::log_h(double r) const {
    double hv = h(r);
    Jet l = base_.log_area_tilde(r);
    double d1 = kappa2_ * std::exp(-l.f);  // h' = kappa2 / S
    double d2 = -d1 * l.d1;                // h'' = -kappa2 S'/S^2
    double g = d1 / hv;
    return {std::log(hv), g, d2 / hv - g * g};
}

TransformPair make_transform_pair(const WeightedModel& base, std::shared_ptr<const RadialWeight> h, double kappa1,
                                  double kappa2) {
    if (base.has_weight()) throw ArgumentError("transform pair: base model must carry h = 1");
    TransformPair p{base, h, WeightedModel(base.profile(), h), kappa1, kappa2};
    if (!h) p.transformed = base;
    return p;
}

TransformPair build_two_end_weight(const WeightedModel& model, const TwoEndOptions& opt) {
    if (model.domain() != Domain::full_line || model.is_view())
        throw ArgumentError("build_two_end_weight: model must be a full-line model");
    if (model.has_weight()) throw ArgumentError("build_two_end_weight: base model must carry h = 1");
    if (classify_parabolicity(model, End::minus) == Parabolicity::parabolic)
        throw PreconditionError("build_two_end_weight: minus end is parabolic, h would be unbounded");
    double r_hi = opt.r_hi;
    if (r_hi <= 0.0) {
        r_hi = 10.0;
        while (r_hi < 2e4 && std::fabs(model.log_area(r_hi).f) < 650.0) r_hi *= 1.25;
        r_hi = std::min(r_hi, 2e4);
        // Step back inside the admissible range.
        while (std::fabs(model.log_area(r_hi).f) >= 650.0) r_hi /= 1.05;
    }
    auto w = std::make_shared<HarmonicWeight>(model, 1.0, 1.0, opt.r_lo, r_hi);
    double lowest = w->integral_at_minus_infinity();
    if (!std::isfinite(lowest))
        throw PreconditionError("build_two_end_weight: minus-end integral of 1/S does not converge");
    double kappa1 = 1.0 + std::fabs(std::min(0.0, lowest));
    w->set_kappa1(kappa1);
    return make_transform_pair(model, w, kappa1, 1.0);
}

IdentityReport verify_kernel_identity(const TransformPair& pair, const GridSpec& grid,
                                      const std::vector<double>& times, int sources) {
    if (sources < 1) throw ArgumentError("verify_kernel_identity: need at least one source");
    auto measure = [&](const GridSpec& g, int stride, int& compared) {
        std::vector<double> r = grid_nodes(g);
        int n = static_cast<int>(r.size());
        std::vector<int> src;
        for (int j = 1; j <= sources; ++j) {
            int coarse = (grid.nodes - 1) * j / (sources + 1);
            src.push_back(coarse * stride);
        }
        KernelOptions ko{true, true};
        KernelDiag q = kernel_diag(pair.base, g, BoundaryCondition::dirichlet, times, src, ko);
        KernelDiag qt = kernel_diag(pair.transformed, g, BoundaryCondition::dirichlet, times, src, ko);
        std::vector<double> h(n);
        for (int i = 0; i < n; ++i) h[i] = pair.h(r[i]);
        double worst = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t a = 0; a < src.size(); ++a) {
                const auto& row = q.rows[k * src.size() + a];
                const auto& rowt = qt.rows[k * src.size() + a];
                double ha = h[src[a]];
                for (int j = 1; j + 1 < n; ++j) {
                    if (row[j] < 1e-12) continue;
                    double e = std::fabs(row[j] - ha * h[j] * rowt[j]) / row[j];
                    worst = std::max(worst, e);
                    ++compared;
                }
            }
        return worst;
    };
    IdentityReport rep;
    int dummy = 0;
    rep.max_rel_err = measure(grid, 1, rep.compared);
    GridSpec fine = grid;
    fine.nodes = 2 * grid.nodes - 1;
    fine.dt = 0.5 * grid.dt;
    rep.fine_rel_err = measure(fine, 2, dummy);
    rep.convergence_order = (rep.max_rel_err > 0.0 && rep.fine_rel_err > 0.0)
                                ? std::log2(rep.max_rel_err / rep.fine_rel_err)
                                : 0.0;
    return rep;
}

}  // namespace heatlab
