#pragma once

#include <memory>
#include <vector>

#include "heatlab/heat_solver.hpp"
#include "heatlab/model_geometry.hpp"

namespace heatlab {

// h(r) = kappa1 + kappa2 * integral_1^r dt / S(t), tabulated with cubic
// Hermite interpolation (the derivative 1/S is used exactly at the nodes).
class HarmonicWeight final : public RadialWeight {
public:
    HarmonicWeight(const WeightedModel& base, double kappa1, double kappa2, double r_lo, double r_hi);

    Jet log_h(double r) const override;
    double h(double r) const override;
    double r_min() const override { return r_.front(); }
    double r_max() const override { return r_.back(); }
    double integral_from_one(double r) const;  // integral_1^r dt / S
    double integral_at_minus_infinity() const { return I_minus_inf_; }
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }
    void set_kappa1(double k) { kappa1_ = k; }

private:
    WeightedModel base_;
    double kappa1_, kappa2_;
    std::vector<double> r_, I_, dI_;
    double I_minus_inf_ = 0.0;
};

struct TransformPair {
    WeightedModel base;
    std::shared_ptr<const RadialWeight> weight;
    WeightedModel transformed;
    double kappa1 = 1.0;
    double kappa2 = 1.0;

    double h(double r) const { return weight ? weight->h(r) : 1.0; }
};

TransformPair make_transform_pair(const WeightedModel& base, std::shared_ptr<const RadialWeight> h,
                                  double kappa1 = 1.0, double kappa2 = 1.0);

struct TwoEndOptions {
    double r_lo = -80.0;
    double r_hi = 0.0;  // 0 selects the largest radius where |log S| stays below 650, capped at 2e4
};

TransformPair build_two_end_weight(const WeightedModel& model, const TwoEndOptions& opt = {});

struct IdentityReport {
    double max_rel_err = 0.0;
    double fine_rel_err = 0.0;
    double convergence_order = 0.0;
    int compared = 0;
};

// Dirichlet kernels of base and transformed models on the grid (left end
// Dirichlet, far end absorbing) compared through q = h(r) h(r') q~ at the
// grid and at the grid refined by two in space and time.
IdentityReport verify_kernel_identity(const TransformPair& pair, const GridSpec& grid,
                                      const std::vector<double>& times, int sources = 8);

}  // namespace heatlab
