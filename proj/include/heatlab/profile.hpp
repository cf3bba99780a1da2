#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace heatlab {

// Value with first and second derivative.
struct Jet {
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

Jet exp_of_log(const Jet& l);  // (e^l)^{(k)} from l^{(k)}
Jet log_of(const Jet& s);      // (log s)^{(k)} from s^{(k)}

enum class Family { exp_alpha, euclidean, power, hyperbolic, rlogr, table, two_end };
enum class Domain { half_line, full_line };

const char* to_string(Family f);

// Warping profile psi of a model manifold and its area S = psi^{n-1}.
// Immutable; copies share the underlying data.
class RadialProfile {
public:
    // psi = exp(-r^alpha/(n-1)) for r >= cap_radius; log S is continued to
    // [0, cap_radius] by a cubic with zero slope at 0 matching value, first
    // and second derivative at cap_radius.
    static RadialProfile exp_alpha(double alpha, int n, double cap_radius = 0.5);
    static RadialProfile euclidean(int n);
    // psi = r^beta with the same cap treatment as exp_alpha (cap 0 keeps the pole).
    static RadialProfile power(double beta, int n, double cap_radius = 0.0);
    static RadialProfile hyperbolic(int n);
    // Two-dimensional: S = r on [0,1], S = r log r on [2,inf), quintic blend of log S between.
    static RadialProfile rlogr();
    // Log-linear interpolation of psi through (r_k, psi_k); n is the dimension.
    static RadialProfile table(std::vector<double> r, std::vector<double> psi, int n = 2);
    static RadialProfile table_from_csv(const std::string& path, int n = 2);
    // Full line: plus(r) for r >= join, minus(-r) for r <= -join, quintic
    // blend of log S on [-join, join].
    static RadialProfile two_end(const RadialProfile& plus, const RadialProfile& minus, double join = 1.0);
    // Same profile on the full line; only defined for S constant (power with beta = 0).
    RadialProfile on_full_line() const;

    Family family() const;
    Domain domain() const;
    int dim() const;
    double alpha() const;
    double beta() const;
    double cap_radius() const;
    double r_min() const;
    double r_max() const;
    std::optional<RadialProfile> plus() const;
    std::optional<RadialProfile> minus() const;
    std::string describe() const;

    Jet log_area(double r) const;  // log S and derivatives
    Jet area(double r) const;      // S, S', S''
    Jet psi(double r) const;

    struct Impl;

private:
    explicit RadialProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// Parses `family=exp_alpha alpha=0.5 n=2 cap_radius=0.5` or
// `family=table path=<csv with header r,psi>`. Throws ConfigError.
RadialProfile parse_profile(const std::string& spec);

}  // namespace heatlab
