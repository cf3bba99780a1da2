#include "heatlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "heatlab/errors.hpp"
#include "heatlab/quadrature.hpp"

namespace heatlab {

bool integrable_at_zero(const std::function<double(double)>& Lambda) {
    auto f = [&](double u) { return 1.0 / Lambda(std::exp(u)); };
    TailResult r = tail_integral(f, 0.0, -1, 1e-10, 1.0, 9, QuadOptions{1e-8, 1e-300, 48});
    return r.converged && std::isfinite(r.value);
}

FaberKrahnFunction fk_from_iso(const IsoProfile& J) {
    if (!J.j_over_v_nonincreasing)
        throw PreconditionError("fk_from_iso: J(v)/v must be nonincreasing");
    FaberKrahnFunction fk;
    auto j = J.J;
    fk.Lambda = [j](double v) {
        double q = j(v) / v;
        return 0.25 * q * q;
    };
    fk.nonincreasing = true;
    fk.integrable_at_zero = integrable_at_zero(fk.Lambda);
    return fk;
}

FaberKrahnFunction fk_connected_sum(const std::vector<FaberKrahnFunction>& parts, double c, double Q) {
    if (parts.empty()) throw ArgumentError("fk_connected_sum: no parts");
    if (!(c > 0.0)) throw ArgumentError("fk_connected_sum: c must be positive");
    if (!(Q > 1.0)) throw ArgumentError("fk_connected_sum: Q must exceed 1");
    FaberKrahnFunction fk;
    fk.Lambda = [parts, c, Q](double v) {
        double m = INFINITY;
        for (const auto& p : parts) m = std::min(m, p.Lambda(Q * v));
        return c * m;
    };
    fk.nonincreasing = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.nonincreasing; });
    fk.integrable_at_zero =
        std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.integrable_at_zero; });
    return fk;
}

namespace {

// G(u) = integral_{-inf}^{u} dx / Lambda(e^x), the gamma integral in log v.
class GammaIntegral {
public:
    explicit GammaIntegral(const FaberKrahnFunction& fk) : fk_(fk) {}

    double integrand(double x) const { return 1.0 / fk_.Lambda(std::exp(x)); }

    // Power-law substitution below u: Lambda ~ Lambda(e^u) e^{-q (x-u)}.
    double head(double u) const {
        double l0 = fk_.Lambda(std::exp(u)), l1 = fk_.Lambda(std::exp(u - 1.0));
        double q = std::log(l1 / l0);
        if (q > 1e-3 && std::isfinite(q)) return 1.0 / (q * l0);
        TailResult r = tail_integral([&](double x) { return integrand(x); }, u, -1, 1e-12, 1.0, 9, quad_);
        if (!r.converged || !std::isfinite(r.value))
            throw NumericFailure("gamma: integral near zero does not converge");
        return r.value;
    }

    double at(double u) const {
        if (u <= u_split_) return head(u);
        return head(u_split_) + segment(u_split_, u);
    }

    double segment(double a, double b) const {
        return adaptive_simpson([&](double x) { return integrand(x); }, a, b, quad_);
    }

private:
    const FaberKrahnFunction& fk_;
    double u_split_ = -40.0;
    QuadOptions quad_{1e-11, 1e-300, 48};
};

}  // namespace

double gamma_inverse(const FaberKrahnFunction& fk, double t) {
    if (!fk.integrable_at_zero) throw PreconditionError("heat_upper_bound: Lambda is not integrable at zero");
    if (!(t > 0.0)) throw ArgumentError("gamma: t must be positive");
    GammaIntegral G(fk);
    double ua = 0.0, ub = 0.0;
    double ga = G.at(0.0), gb = ga;
    if (ga < t) {
        for (double step = 1.0;; step *= 2.0) {
            ua = ub;
            ga = gb;
            ub = ua + step;
            if (ub > 700.0) throw NumericFailure("gamma: bracket failure (t too large)");
            gb = ga + G.segment(ua, ub);
            if (gb >= t) break;
        }
    } else {
        for (double step = 1.0;; step *= 2.0) {
            ub = ua;
            gb = ga;
            ua = ub - step;
            if (ua < -700.0) throw NumericFailure("gamma: bracket failure (t too small)");
            ga = G.at(ua);
            if (ga <= t) break;
        }
    }
    while (ub - ua > 1e-11) {
        double um = 0.5 * (ua + ub);
        double gm = ga + G.segment(ua, um);
        if (gm < t) {
            ua = um;
            ga = gm;
        } else {
            ub = um;
        }
    }
    return std::exp(0.5 * (ua + ub));
}

double heat_upper_bound(const FaberKrahnFunction& fk, double t) { return 4.0 / gamma_inverse(fk, 0.5 * t); }

namespace {

// Number of eigenvalues below x of the symmetric tridiagonal (d, e).
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double off = i > 0 ? e[i - 1] * e[i - 1] / q : 0.0;
        q = d[i] - x - off;
        if (q == 0.0) q = -std::numeric_limits<double>::min() * 1e10;
        if (q < 0.0) ++count;
    }
    return count;
}

double lambda1_grid(const WeightedModel& model, double s0, double R, BoundaryCondition left_bc, int N) {
    std::vector<double> r(N + 1);
    for (int i = 0; i <= N; ++i) r[i] = s0 + (R - s0) * i / N;
    r.back() = R;
    Discretization disc = discretize(model, r);
    int lo = left_bc == BoundaryCondition::dirichlet ? 1 : 0;
    int hi = N - 1;
    std::vector<double> d, e;
    for (int i = lo; i <= hi; ++i) {
        double kl = i > 0 ? disc.k[i - 1] : 0.0;
        d.push_back((kl + disc.k[i]) / disc.w[i]);
        if (i < hi) e.push_back(-disc.k[i] / std::sqrt(disc.w[i] * disc.w[i + 1]));
    }
    double gmax = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double rad = (i > 0 ? std::fabs(e[i - 1]) : 0.0) + (i < e.size() ? std::fabs(e[i]) : 0.0);
        gmax = std::max(gmax, d[i] + rad);
    }
    double a = 0.0, b = gmax;
    for (int it = 0; it < 400 && b - a > 1e-15 * b; ++it) {
        double m = 0.5 * (a + b);
        if (sturm_count(d, e, m) >= 1)
            b = m;
        else
            a = m;
    }
    if (!(b > 0.0) || !std::isfinite(b)) throw NumericFailure("lambda1: bisection failed");
    return 0.5 * (a + b);
}

}  // namespace

double lambda1_dirichlet(const WeightedModel& model, double R, BoundaryCondition left_bc, int nodes) {
    if (model.domain() != Domain::half_line) throw ArgumentError("lambda1_dirichlet: half-line model required");
    double s0 = model.r_min();
    if (!(R > s0) || R > model.r_max()) throw RangeError("lambda1_dirichlet: R outside the model domain");
    if (nodes < 512) throw ArgumentError("lambda1_dirichlet: at least 512 nodes required");
    double coarse = lambda1_grid(model, s0, R, left_bc, nodes);
    double fine = lambda1_grid(model, s0, R, left_bc, 2 * nodes);
    return (4.0 * fine - coarse) / 3.0;
}

double lambda1_rayleigh_upper(const WeightedModel& model, double R) {
    double V = volume(model, R);
    if (!(V > 0.0)) throw ArgumentError("lambda1_rayleigh_upper: V~(R) must be positive");
    double q = model.area_tilde(R) / V;
    return 4.0 * q * q;
}

double lambda1_lower_locally_harnack(double c, double rho, double V0, double n, double muU) {
    if (!(c > 0.0 && rho > 0.0 && V0 > 0.0 && n > 0.0 && muU > 0.0))
        throw ArgumentError("lambda1_lower_locally_harnack: arguments must be positive");
    double x = V0 / muU;
    return c / (rho * rho) * std::min(x * x, std::pow(x, 2.0 / n));
}

HeatLowerBound::HeatLowerBound(const WeightedModel& model, const LowerBoundOptions& opt)
    : model_(model), opt_(opt) {
    if (model.domain() != Domain::half_line) throw ArgumentError("heat_lower_bound: half-line model required");
    table_ = std::make_shared<VolumeTable>(model, opt.v_max);
}

double HeatLowerBound::log_value(double R, double t) const {
    double V = table_->volume(R);
    double lam;
    if (opt_.use_eigensolver) {
        lam = lambda1_dirichlet(model_, R, BoundaryCondition::neumann, 512);
    } else {
        double q = model_.area_tilde(R) / V;
        lam = 4.0 * q * q;
    }
    return -std::log(V) - lam * t;
}

double HeatLowerBound::best_radius(double t) const {
    if (!(t > 0.0)) throw ArgumentError("heat_lower_bound: t must be positive");
    double s_lo = std::max(table_->s_begin(), 0.0) + 1e-3, s_hi = table_->s_end() * (1.0 - 1e-9);
    double lo = s_lo, hi = s_hi;
    if (opt_.alpha_seed > 0.0) {
        double Rs = std::pow(t, 1.0 / (2.0 - opt_.alpha_seed));
        lo = std::max(s_lo, Rs / 100.0);
        hi = std::min(s_hi, Rs * 100.0);
        if (!(hi > lo)) lo = s_lo, hi = s_hi;
    }
    const int ng = opt_.use_eigensolver ? 60 : 400;
    double a = std::log(lo), b = std::log(hi);
    int best = 0;
    double bestv = -INFINITY;
    std::vector<double> lr(ng);
    for (int i = 0; i < ng; ++i) {
        lr[i] = a + (b - a) * i / (ng - 1);
        double v = log_value(std::exp(lr[i]), t);
        if (v > bestv) bestv = v, best = i;
    }
    if (opt_.use_eigensolver) return std::exp(lr[best]);
    double x0 = lr[std::max(0, best - 1)], x1 = lr[std::min(ng - 1, best + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto F = [&](double x) { return -log_value(std::exp(x), t); };
    double c = x1 - gr * (x1 - x0), d = x0 + gr * (x1 - x0);
    double fc = F(c), fd = F(d);
    for (int it = 0; it < 100 && x1 - x0 > 1e-10; ++it) {
        if (fc < fd) {
            x1 = d; d = c; fd = fc;
            c = x1 - gr * (x1 - x0); fc = F(c);
        } else {
            x0 = c; c = d; fc = fd;
            d = x0 + gr * (x1 - x0); fd = F(d);
        }
    }
    double xb = fc < fd ? c : d;
    return -F(xb) > bestv ? std::exp(xb) : std::exp(lr[best]);
}

double HeatLowerBound::operator()(double t) const { return std::exp(log_value(best_radius(t), t)); }

double heat_lower_bound(const WeightedModel& model, double t, const LowerBoundOptions& opt) {
    return HeatLowerBound(model, opt)(t);
}

double log_lower_bound(double N, double c_x, double t) {
    if (!(t > std::exp(1.0))) throw ArgumentError("log_lower_bound: t must exceed e");
    if (!(N > 0.0 && c_x > 0.0)) throw ArgumentError("log_lower_bound: N and c_x must be positive");
    return c_x / std::pow(t * std::log(t), 0.5 * N);
}

namespace {

// Least squares for y ~ X b by modified Gram-Schmidt; returns residual sum of squares.
double least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& y,
                     std::vector<double>& coef) {
    std::size_t m = y.size(), k = cols.size();
    std::vector<std::vector<double>> Q = cols;
    std::vector<std::vector<double>> R(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            double dot = 0.0;
            for (std::size_t r = 0; r < m; ++r) dot += Q[i][r] * Q[j][r];
            R[i][j] = dot;
            for (std::size_t r = 0; r < m; ++r) Q[j][r] -= dot * Q[i][r];
        }
        double nrm = 0.0;
        for (double v : Q[j]) nrm += v * v;
        nrm = std::sqrt(nrm);
        R[j][j] = nrm;
        if (nrm > 0.0)
            for (double& v : Q[j]) v /= nrm;
    }
    std::vector<double> qty(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t r = 0; r < m; ++r) qty[j] += Q[j][r] * y[r];
    coef.assign(k, 0.0);
    for (std::size_t j = k; j-- > 0;) {
        double s = qty[j];
        for (std::size_t i = j + 1; i < k; ++i) s -= R[j][i] * coef[i];
        coef[j] = R[j][j] > 1e-300 ? s / R[j][j] : 0.0;
    }
    double rss = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        double f = 0.0;
        for (std::size_t j = 0; j < k; ++j) f += cols[j][r] * coef[j];
        rss += (y[r] - f) * (y[r] - f);
    }
    return rss;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, bool prefactor) {
    std::size_t m = times.size();
    if (m != values.size() || m < 4) throw ArgumentError("fit_decay: need at least 4 matching samples");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(times[i] > 0.0) || !(values[i] > 0.0)) throw ArgumentError("fit_decay: times and values must be positive");
        if (i > 0 && !(times[i] > times[i - 1])) throw ArgumentError("fit_decay: times must increase");
        if (i > 0 && !(values[i] < values[i - 1])) throw ArgumentError("fit_decay: series is not decreasing");
    }
    if (times.back() / times.front() < std::pow(10.0, 1.5))
        throw ArgumentError("fit_decay: need at least 1.5 decades of t");
    std::vector<double> y(m), lt(m);
    for (std::size_t i = 0; i < m; ++i) {
        y[i] = std::log(values[i]);
        lt[i] = std::log(times[i]);
    }
    auto solve_at = [&](double beta, std::vector<double>& coef) {
        std::vector<std::vector<double>> cols;
        cols.emplace_back(m, 1.0);
        std::vector<double> tb(m);
        for (std::size_t i = 0; i < m; ++i) tb[i] = -std::pow(times[i], beta);
        cols.push_back(tb);
        if (prefactor) {
            std::vector<double> nl(m);
            for (std::size_t i = 0; i < m; ++i) nl[i] = -lt[i];
            cols.push_back(nl);
        }
        return least_squares(cols, y, coef);
    };
    const double b_lo = 0.005, b_hi = 2.5;
    const int ng = 400;
    std::vector<double> grid(ng), rss(ng);
    std::vector<double> coef;
    int best = 0;
    for (int i = 0; i < ng; ++i) {
        grid[i] = b_lo * std::pow(b_hi / b_lo, double(i) / (ng - 1));
        rss[i] = solve_at(grid[i], coef);
        if (rss[i] < rss[best]) best = i;
    }
    double x0 = std::log(grid[std::max(0, best - 1)]), x1 = std::log(grid[std::min(ng - 1, best + 1)]);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto F = [&](double x) {
        std::vector<double> c;
        return solve_at(std::exp(x), c);
    };
    double c = x1 - gr * (x1 - x0), d = x0 + gr * (x1 - x0);
    double fc = F(c), fd = F(d);
    for (int it = 0; it < 200 && x1 - x0 > 1e-12; ++it) {
        if (fc < fd) {
            x1 = d; d = c; fd = fc;
            c = x1 - gr * (x1 - x0); fc = F(c);
        } else {
            x0 = c; c = d; fc = fd;
            d = x0 + gr * (x1 - x0); fd = F(d);
        }
    }
    double beta = std::min(fc, fd) < rss[best] ? std::exp(fc < fd ? c : d) : grid[best];
    DecayFit fit;
    fit.beta = beta;
    fit.rss = solve_at(beta, coef);
    fit.log_scale = coef[0];
    fit.rate = coef[1];
    fit.power = prefactor ? coef[2] : 0.0;
    double drop = y.front() - y.back();
    double expo = fit.rate * (std::pow(times.back(), beta) - std::pow(times.front(), beta));
    fit.polynomial = beta < 0.05 || fit.rate <= 0.0 || expo < 0.05 * drop;
    return fit;
}

double fit_decay_exponent(const std::vector<double>& times, const std::vector<double>& values, bool prefactor) {
    return fit_decay(times, values, prefactor).beta;
}

void write_bounds_csv(const std::string& path, const BoundsReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,upper,lower,numeric\n" << std::setprecision(17);
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        out << rep.times[i] << ',' << rep.upper[i] << ',' << rep.lower[i] << ',' << rep.numeric[i] << '\n';
}

void write_eigen_csv(const std::string& path, const std::vector<EigenRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "R,lambda1,rayleigh_upper\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.R << ',' << r.lambda1 << ',' << r.rayleigh_upper << '\n';
}

}  // namespace heatlab
