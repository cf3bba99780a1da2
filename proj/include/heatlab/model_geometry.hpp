#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "heatlab/profile.hpp"
#include "heatlab/quadrature.hpp"

namespace heatlab {

// Positive radial weight h, exposed through log h and its derivatives.
class RadialWeight {
public:
    virtual ~RadialWeight() = default;
    virtual Jet log_h(double r) const = 0;
    virtual double h(double r) const { return std::exp(log_h(r).f); }
    virtual double r_min() const { return -INFINITY; }
    virtual double r_max() const { return INFINITY; }
};

class FunctionWeight final : public RadialWeight {
public:
    explicit FunctionWeight(std::function<Jet(double)> log_h) : fn_(std::move(log_h)) {}
    Jet log_h(double r) const override { return fn_(r); }

private:
    std::function<Jet(double)> fn_;
};

// Model manifold with area S = psi^{n-1} and weighted area S~ = h^2 S.
// A view re-parametrizes the model by s >= 0 with r = origin + orientation*s;
// views are half-line models used for single ends.
class WeightedModel {
public:
    explicit WeightedModel(RadialProfile profile);
    WeightedModel(RadialProfile profile, std::shared_ptr<const RadialWeight> weight);

    const RadialProfile& profile() const { return profile_; }
    const std::shared_ptr<const RadialWeight>& weight() const { return weight_; }
    bool has_weight() const { return static_cast<bool>(weight_); }
    int dim() const { return profile_.dim(); }
    Domain domain() const;
    double r_min() const;
    double r_max() const;

    double to_model(double s) const { return origin_ + orientation_ * s; }
    double h(double s) const;
    Jet log_area(double s) const;
    Jet area(double s) const;
    Jet log_area_tilde(double s) const;
    double area_tilde(double s) const;

    WeightedModel view(double origin, int orientation) const;
    bool is_view() const { return view_; }
    double view_origin() const { return origin_; }
    int view_orientation() const { return orientation_; }

private:
    Jet orient(const Jet& j) const { return {j.f, orientation_ * j.d1, j.d2}; }

    RadialProfile profile_;
    std::shared_ptr<const RadialWeight> weight_;
    double origin_ = 0.0;
    int orientation_ = 1;
    bool view_ = false;
};

// Tabulated volume s -> V~(s) from the left end of a half-line model, with
// cubic Hermite interpolation using V~' = S~ exactly at the nodes.
class VolumeTable {
public:
    VolumeTable(const WeightedModel& model, double v_max, double s_max = INFINITY);

    double volume(double s) const;
    double inverse(double v) const;  // s with V~(s) = v
    double s_begin() const { return s_.front(); }
    double s_end() const { return s_.back(); }
    double v_end() const { return V_.back(); }
    const std::vector<double>& nodes() const { return s_; }
    const std::vector<double>& volumes() const { return V_; }
    const std::vector<double>& areas() const { return A_; }

private:
    double hermite(std::size_t k, double s) const;
    std::vector<double> s_, V_, A_;
};

double volume(const WeightedModel& model, double R);

struct CapacityResult {
    double capacity = 0.0;
    double resistance = 0.0;  // integral of 1/S~ over [a, b]
    std::function<double(double)> potential;
};

CapacityResult capacity_annulus(const WeightedModel& model, double a, double b);

// u(r) = c1 + c2 * integral_{r1}^{r} dt / S~(t).
class RadialHarmonic {
public:
    RadialHarmonic(WeightedModel model, double c1, double c2, double r1);
    double operator()(double r) const;
    double derivative(double r) const;
    double increment(double a, double b) const;  // u(b) - u(a)
    double c1() const { return c1_; }
    double c2() const { return c2_; }

private:
    WeightedModel model_;
    double c1_, c2_, r1_;
};

RadialHarmonic radial_harmonic(const WeightedModel& model, double c1, double c2, double r1);

// Sup over interior nodes of the flux-normalized conservative residual
// |S~_{i+1/2}(u_{i+1}-u_i) - S~_{i-1/2}(u_i-u_{i-1})| / (|c2| dr^2) on a uniform grid.
double harmonic_residual(const WeightedModel& model, const RadialHarmonic& u, double a, double b, int nodes);

enum class End { plus, minus };
enum class Parabolicity { parabolic, nonparabolic };
const char* to_string(Parabolicity p);

struct ParabolicityReport {
    Parabolicity kind = Parabolicity::parabolic;
    double tail = 0.0;
    double reach = 0.0;
};

ParabolicityReport parabolicity_report(const WeightedModel& model, End end);
Parabolicity classify_parabolicity(const WeightedModel& model, End end);

double ricci_radial(const WeightedModel& model, double r);

struct HarnackPremises {
    double ratio_bound = 0.0;
    double N_estimate = 0.0;
    bool pass = false;
};

HarnackPremises check_spherical_harnack_premises(const WeightedModel& model, double A, double r_lo,
                                                 double r_hi);

double fit_volume_exponent(const WeightedModel& model, double r_lo, double r_hi);

}  // namespace heatlab
