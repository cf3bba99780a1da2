#include "heatlab/heat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>

#include "heatlab/errors.hpp"

namespace heatlab {

std::vector<double> grid_nodes(const GridSpec& g) {
    if (!(g.r_min < g.r_max)) throw ArgumentError("GridSpec: need r_min < r_max");
    if (g.nodes < 64) throw ArgumentError("GridSpec: need at least 64 nodes");
    std::vector<double> r(g.nodes);
    double L = g.r_max - g.r_min;
    if (g.spacing == Spacing::uniform || g.ratio == 1.0) {
        for (int i = 0; i < g.nodes; ++i) r[i] = g.r_min + L * double(i) / (g.nodes - 1);
    } else {
        if (!(g.ratio > 1.0 && g.ratio <= 1.05)) throw ArgumentError("GridSpec: graded ratio must lie in (1, 1.05]");
        double h0 = L * (g.ratio - 1.0) / (std::pow(g.ratio, g.nodes - 1) - 1.0);
        r[0] = g.r_min;
        double h = h0;
        for (int i = 1; i < g.nodes; ++i, h *= g.ratio) r[i] = r[i - 1] + h;
        r.back() = g.r_max;
    }
    return r;
}

Discretization discretize(const WeightedModel& model, const std::vector<double>& r) {
    std::size_t n = r.size();
    Discretization d;
    d.r = r;
    d.w.resize(n);
    d.k.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double dr = r[i + 1] - r[i];
        d.k[i] = model.area_tilde(0.5 * (r[i] + r[i + 1])) / dr;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double left = i > 0 ? r[i] - r[i - 1] : 0.0;
        double right = i + 1 < n ? r[i + 1] - r[i] : 0.0;
        double dual = 0.5 * (left + right);
        double s = model.area_tilde(r[i]);
        if (s == 0.0) {
            double probe = right > 0.0 ? r[i] + 0.25 * right : r[i] - 0.25 * left;
            s = model.area_tilde(probe);
        }
        d.w[i] = s * dual;
    }
    return d;
}

namespace {

struct Factor {
    double theta = 0.5, tau = 0.0;
    std::vector<double> cp, m, a;  // Thomas coefficients and off-diagonal
};

class Stepper {
public:
    Stepper(const Discretization& d, const GridSpec& g, BoundaryCondition left_bc, const std::vector<double>& times)
        : d_(d), n_(d.r.size()) {
        lo_ = left_bc == BoundaryCondition::dirichlet ? 1 : 0;
        hi_ = g.far_bc == BoundaryCondition::dirichlet ? n_ - 2 : n_ - 1;
        D_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (i > 0) D_[i] += d.k[i - 1];
            if (i + 1 < n_) D_[i] += d.k[i];
        }
        bool cn = g.scheme == Scheme::crank_nicolson;
        double theta = cn ? 0.5 : 1.0;
        main_ = factor(theta, g.dt);
        double t = 0.0;
        if (cn && g.rannacher_startup_steps > 0) {
            startup_ = factor(1.0, 0.5 * g.dt);
            nstart_ = g.rannacher_startup_steps;
            t = 0.5 * g.dt * nstart_;
        }
        for (double T : times) {
            if (T < t - 1e-12 * std::max(1.0, T))
                throw ArgumentError("solver: output times must be increasing and not precede the startup steps");
            long steps = static_cast<long>(std::floor((T - t) / g.dt + 1e-9));
            double done = t + steps * g.dt;
            double rest = T - done;
            plan_steps_.push_back(steps);
            if (rest > 1e-12 * std::max(1.0, T)) {
                partial_.push_back(factor(theta, rest));
                has_partial_.push_back(true);
            } else {
                partial_.emplace_back();
                has_partial_.push_back(false);
            }
            t = T;
        }
    }

    struct Flux {
        double left = 0.0, far = 0.0, max_defect = 0.0;
    };

    // Advances u through every output time, calling visit(k, u) at time k.
    template <class Visit>
    Flux run(std::vector<double>& u, Visit&& visit) const {
        std::vector<double> tmp(n_);
        Flux f;
        for (int s = 0; s < nstart_; ++s) step(u, tmp, startup_, f);
        for (std::size_t k = 0; k < plan_steps_.size(); ++k) {
            for (long s = 0; s < plan_steps_[k]; ++s) step(u, tmp, main_, f);
            if (has_partial_[k]) step(u, tmp, partial_[k], f);
            visit(k, u);
        }
        return f;
    }

    double mass(const std::vector<double>& u) const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i) m += d_.w[i] * u[i];
        return m;
    }

private:
    Factor factor(double theta, double tau) const {
        Factor f;
        f.theta = theta;
        f.tau = tau;
        f.cp.assign(n_, 0.0);
        f.m.assign(n_, 0.0);
        f.a.assign(n_, 0.0);
        for (std::size_t i = lo_; i < hi_; ++i) f.a[i] = -theta * tau * d_.k[i];
        for (std::size_t i = lo_; i <= hi_; ++i) {
            double b = d_.w[i] + theta * tau * D_[i];
            double denom = i == lo_ ? b : b - f.a[i - 1] * f.cp[i - 1];
            if (!(std::fabs(denom) > 0.0) || !std::isfinite(denom))
                throw NumericFailure("solver: singular tridiagonal pivot at node " + std::to_string(i));
            f.m[i] = 1.0 / denom;
            f.cp[i] = f.a[i] * f.m[i];
        }
        return f;
    }

    void step(std::vector<double>& u, std::vector<double>& rhs, const Factor& f, Flux& flux) const {
        const double* w = d_.w.data();
        const double* k = d_.k.data();
        const double* D = D_.data();
        double ex = (1.0 - f.theta) * f.tau;
        double m_before = mass(u);
        for (std::size_t i = lo_; i <= hi_; ++i) {
            double Ku = D[i] * u[i];
            if (i > 0) Ku -= k[i - 1] * u[i - 1];
            if (i + 1 < n_) Ku -= k[i] * u[i + 1];
            rhs[i] = w[i] * u[i] - ex * Ku;
        }
        double old_left = lo_ == 1 ? u[1] : 0.0;
        double old_far = hi_ == n_ - 2 ? u[n_ - 2] : 0.0;
        rhs[lo_] *= f.m[lo_];
        for (std::size_t i = lo_ + 1; i <= hi_; ++i) rhs[i] = (rhs[i] - f.a[i - 1] * rhs[i - 1]) * f.m[i];
        u[hi_] = rhs[hi_];
        for (std::size_t i = hi_; i-- > lo_;) u[i] = rhs[i] - f.cp[i] * u[i + 1];
        double out = 0.0;
        if (lo_ == 1) {
            double fl = f.tau * k[0] * (f.theta * u[1] + (1.0 - f.theta) * old_left);
            flux.left += fl;
            out += fl;
        }
        if (hi_ == n_ - 2) {
            double ff = f.tau * k[n_ - 2] * (f.theta * u[n_ - 2] + (1.0 - f.theta) * old_far);
            flux.far += ff;
            out += ff;
        }
        if (m_before > 0.0) {
            double defect = std::fabs(mass(u) - m_before + out) / m_before;
            flux.max_defect = std::max(flux.max_defect, defect);
        }
    }

    const Discretization& d_;
    std::size_t n_, lo_, hi_;
    std::vector<double> D_;
    Factor main_, startup_;
    int nstart_ = 0;
    std::vector<long> plan_steps_;
    std::vector<Factor> partial_;
    std::vector<bool> has_partial_;
};

double stability_diag(const WeightedModel& model, const GridSpec& g, const std::vector<double>& r) {
    double slope = 0.0, dmin = INFINITY;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double s = std::fabs(model.log_area_tilde(r[i]).d1);
        if (std::isfinite(s)) slope = std::max(slope, s);
        if (i > 0) dmin = std::min(dmin, r[i] - r[i - 1]);
    }
    return g.dt * slope / dmin;
}

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw ArgumentError("solver: no output times");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw ArgumentError("solver: output times must be positive");
        if (i > 0 && !(times[i] > times[i - 1])) throw ArgumentError("solver: output times must be increasing");
    }
}

}  // namespace

SolveResult solve(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                  const std::vector<double>& init, const std::vector<double>& times) {
    check_times(times);
    std::vector<double> r = grid_nodes(grid);
    if (init.size() != r.size()) throw ArgumentError("solve: init size does not match the grid");
    for (double v : init)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("solve: init must be nonnegative and finite");
    Discretization d = discretize(model, r);
    Stepper st(d, grid, left_bc, times);
    SolveResult out;
    out.r = r;
    out.times = times;
    std::vector<double> u = init;
    if (left_bc == BoundaryCondition::dirichlet) u.front() = 0.0;
    if (grid.far_bc == BoundaryCondition::dirichlet) u.back() = 0.0;
    out.initial_mass = st.mass(u);
    auto flux = st.run(u, [&](std::size_t, const std::vector<double>& v) {
        out.fields.push_back(v);
        out.mass.push_back(st.mass(v));
    });
    out.far_leakage = flux.far;
    out.left_leakage = flux.left;
    out.max_step_mass_defect = flux.max_defect;
    out.stability = stability_diag(model, grid, r);
    out.leakage_warning = out.initial_mass > 0.0 && flux.far > 0.01 * out.initial_mass;
    if (out.leakage_warning && grid.auto_extend && grid.spacing == Spacing::uniform &&
        grid.r_max - grid.r_min < model.r_max() - grid.r_min) {
        GridSpec wider = grid;
        wider.auto_extend = false;
        wider.r_max = std::min(grid.r_min + 2.0 * (grid.r_max - grid.r_min), model.r_max());
        wider.nodes = static_cast<int>(std::lround((grid.nodes - 1) * (wider.r_max - grid.r_min) /
                                                   (grid.r_max - grid.r_min))) + 1;
        std::vector<double> init2(wider.nodes, 0.0);
        std::copy(init.begin(), init.end(), init2.begin());
        SolveResult again = solve(model, wider, left_bc, init2, times);
        again.extended = true;
        return again;
    }
    return out;
}

namespace {

KernelDiag kernel_impl(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                       const std::vector<double>& times, const std::vector<int>& sources, bool keep_rows,
                       bool parallel) {
    check_times(times);
    std::vector<double> r = grid_nodes(grid);
    int n = static_cast<int>(r.size());
    if (sources.empty()) throw ArgumentError("kernel_diag: no source nodes");
    for (int s : sources)
        if (s < 0 || s >= n) throw ArgumentError("kernel_diag: source node outside the grid");
    Discretization d = discretize(model, r);
    Stepper st(d, grid, left_bc, times);
    std::size_t nt = times.size(), ns = sources.size();
    KernelDiag out;
    out.times = times;
    out.r = r;
    out.w = d.w;
    out.sources = sources;
    out.diag.assign(nt * ns, 0.0);
    out.mass.assign(nt * ns, 0.0);
    out.cross.assign(nt * ns * ns, 0.0);
    if (keep_rows) out.rows.resize(nt * ns);
    std::exception_ptr failure;
    auto one = [&](std::size_t j) {
        std::vector<double> u(n, 0.0);
        u[sources[j]] = 1.0 / d.w[sources[j]];
        st.run(u, [&](std::size_t k, const std::vector<double>& v) {
            out.diag[k * ns + j] = v[sources[j]];
            out.mass[k * ns + j] = st.mass(v);
            for (std::size_t b = 0; b < ns; ++b) out.cross[(k * ns + j) * ns + b] = v[sources[b]];
            if (keep_rows) out.rows[k * ns + j] = v;
        });
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t j = 0; j < ns; ++j) {
            try {
                one(j);
            } catch (...) {
#pragma omp critical(heatlab_kernel_failure)
                failure = std::current_exception();
            }
        }
    } else {
        for (std::size_t j = 0; j < ns; ++j) one(j);
    }
    if (failure) std::rethrow_exception(failure);
    out.min_raw_diag = *std::min_element(out.diag.begin(), out.diag.end());
    for (double& v : out.diag) {
        if (v < 0.0) {
            v = 0.0;
            ++out.clamp_count;
        }
    }
    return out;
}

}  // namespace

KernelDiag kernel_diag(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                       const std::vector<double>& times, const std::vector<int>& source_nodes,
                       const KernelOptions& opt) {
    return kernel_impl(model, grid, left_bc, times, source_nodes, opt.keep_rows, opt.parallel);
}

KernelDiag kernel_diag_serial(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                              const std::vector<double>& times, const std::vector<int>& source_nodes,
                              bool keep_rows) {
    return kernel_impl(model, grid, left_bc, times, source_nodes, keep_rows, false);
}

double KernelDiag::symmetry_error() const {
    double worst = 0.0;
    std::size_t ns = sources.size();
    for (std::size_t t = 0; t < times.size(); ++t)
        for (std::size_t a = 0; a < ns; ++a)
            for (std::size_t b = a + 1; b < ns; ++b) {
                double x = cross_at(t, a, b), y = cross_at(t, b, a);
                double scale = std::max(std::fabs(x), std::fabs(y));
                if (scale < 1e-12) continue;
                worst = std::max(worst, std::fabs(x - y) / scale);
            }
    return worst;
}

namespace {

std::size_t time_index(const KernelDiag& kern, double t) {
    for (std::size_t k = 0; k < kern.times.size(); ++k)
        if (std::fabs(kern.times[k] - t) <= 1e-12 * std::max(1.0, std::fabs(t))) return k;
    throw ArgumentError("sup_diag: time " + std::to_string(t) + " is not among the kernel times");
}

}  // namespace

std::size_t sup_diag_source(const KernelDiag& kern, double t) {
    std::size_t k = time_index(kern, t);
    std::size_t ns = kern.sources.size(), best = 0;
    for (std::size_t j = 1; j < ns; ++j)
        if (kern.at(k, j) > kern.at(k, best)) best = j;
    return best;
}

double sup_diag(const KernelDiag& kern, double t) {
    std::size_t k = time_index(kern, t);
    return kern.at(k, sup_diag_source(kern, t));
}

void write_field_csv(const std::string& path, const std::vector<double>& r, const std::vector<double>& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "r,u\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.size(); ++i) out << r[i] << ',' << u[i] << '\n';
}

}  // namespace heatlab
