#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "heatlab/config.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/h_transform.hpp"
#include "heatlab/isoperimetry.hpp"
#include "heatlab/spectral.hpp"
#include "heatlab/tasks.hpp"

namespace heatlab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

void check(std::vector<VerifyLine>& out, const std::string& module, const std::string& name,
           const std::function<std::pair<bool, std::string>()>& body) {
    VerifyLine l{module, name, false, ""};
    try {
        auto [ok, detail] = body();
        l.pass = ok;
        l.detail = detail;
    } catch (const std::exception& e) {
        l.detail = std::string("threw: ") + e.what();
    }
    out.push_back(l);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

std::vector<VerifyLine> run_verify_suites(std::uint64_t seed) {
    std::vector<VerifyLine> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    check(out, "model_geometry", "volume euclidean n=2 R=2", [] {
        double v = volume(WeightedModel(RadialProfile::euclidean(2)), 2.0);
        return std::pair{rel(v, 2.0) < 1e-8, "V=" + fmt(v)};
    });
    check(out, "model_geometry", "volume nondecreasing and additive", [] {
        WeightedModel m(RadialProfile::exp_alpha(0.5, 2));
        double prev = 0.0, worst = 0.0;
        bool mono = true;
        for (double R = 0.5; R <= 20.0; R += 0.5) {
            double v = volume(m, R);
            mono = mono && v >= prev;
            double split = volume(m, R - 0.5) + adaptive_simpson([&](double x) { return m.area_tilde(x); }, R - 0.5, R);
            worst = std::max(worst, rel(split, v));
            prev = v;
        }
        return std::pair{mono && worst < 1e-7, "additivity err " + fmt(worst)};
    });
    check(out, "model_geometry", "capacity S=1 annulus (1,3)", [] {
        double c = capacity_annulus(WeightedModel(RadialProfile::power(0.0, 2)), 1.0, 3.0).capacity;
        return std::pair{rel(c, 0.5) < 1e-8, "cap=" + fmt(c)};
    });
    check(out, "model_geometry", "ricci of sinh is -1", [] {
        WeightedModel m(RadialProfile::hyperbolic(2));
        double worst = 0.0;
        for (double r = 0.5; r < 20.0; r += 0.37) worst = std::max(worst, std::fabs(ricci_radial(m, r) + 1.0));
        return std::pair{worst < 1e-10, "max dev " + fmt(worst)};
    });
    check(out, "model_geometry", "exp_alpha ends parabolic", [] {
        bool ok = true;
        for (double a : {0.2, 0.5, 1.0})
            ok = ok && classify_parabolicity(WeightedModel(RadialProfile::exp_alpha(a, 2)), End::plus) ==
                           Parabolicity::parabolic;
        return std::pair{ok, std::string("alpha in {0.2,0.5,1}")};
    });
    check(out, "model_geometry", "hyperbolic end nonparabolic", [] {
        auto k = classify_parabolicity(WeightedModel(RadialProfile::hyperbolic(2)), End::plus);
        return std::pair{k == Parabolicity::nonparabolic, std::string(to_string(k))};
    });

    WeightedModel two(RadialProfile::two_end(RadialProfile::exp_alpha(0.5, 2), RadialProfile::hyperbolic(2)));
    check(out, "h_transform", "h positive, nondecreasing, S~ = h^2 S", [&] {
        TransformPair p = build_two_end_weight(two);
        double prev = 0.0, worst = 0.0;
        bool ok = true;
        for (double r = -30.0; r <= 100.0; r += 0.25) {
            double h = p.h(r);
            ok = ok && h > 0.0 && h >= prev * (1.0 - 1e-12);
            prev = h;
            double lhs = p.transformed.area_tilde(r), rhs = h * h * two.area_tilde(r);
            worst = std::max(worst, rel(lhs, rhs));
        }
        return std::pair{ok && worst < 1e-12, "S~ rel err " + fmt(worst)};
    });
    check(out, "h_transform", "parabolic minus end rejected", [] {
        WeightedModel m(RadialProfile::two_end(RadialProfile::exp_alpha(0.5, 2), RadialProfile::exp_alpha(0.5, 2)));
        try {
            build_two_end_weight(m);
        } catch (const PreconditionError&) {
            return std::pair{true, std::string("precondition error")};
        }
        return std::pair{false, std::string("accepted")};
    });

    check(out, "isoperimetry", "inverse integral identity (100 steps)", [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            int k = 1 + static_cast<int>(U(rng) * 12);
            std::vector<double> x{0.0}, y;
            double h = 1.0 + 9.0 * U(rng), t = 0.0;
            for (int j = 0; j < k; ++j) {
                y.push_back(h);
                h *= 0.2 + 0.7 * U(rng);
                t += 0.1 + 3.0 * U(rng);
                x.push_back(t);
            }
            y.push_back(0.0);
            MonotoneTab phi(x, y, Direction::nonincreasing, Interp::step, Extrapolation::hold);
            InversePair pr = generalized_inverse(phi);
            worst = std::max(worst, rel(pr.phi_star.integral(), phi.integral()));
        }
        return std::pair{worst < 1e-10, "max rel " + fmt(worst)};
    });
    check(out, "isoperimetry", "lemma bound below brute force", [&] {
        int violations = 0;
        for (int inst = 0; inst < 3; ++inst) {
            double a = 0.5 + U(rng), p = U(rng), b = 0.5 + U(rng), q = U(rng), P = 1.0 + 4.0 * U(rng),
                   v = 0.5 + 20.0 * U(rng);
            PositiveFn f = [=](double x) { return a * std::pow(x, p); };
            PositiveFn g = [=](double y) { return b * std::pow(std::min(y, P - y), q); };
            double bound = functional_lower_bound(f, g, P, v);
            for (int s = 0; s < 50; ++s) {
                int k = 1 + static_cast<int>(U(rng) * 6);
                std::vector<double> hs, ts;
                double h = 1.0, t = 0.0;
                for (int j = 0; j < k; ++j) {
                    hs.push_back(h);
                    h *= 0.1 + 0.85 * U(rng);
                    ts.push_back(t += U(rng) + 1e-3);
                }
                double scale = P * (0.05 + 0.9 * U(rng)) / ts.back();
                double integral = 0.0, prev = 0.0;
                for (int j = 0; j < k; ++j) ts[j] *= scale;
                for (int j = 0; j < k; ++j) integral += hs[j] * (ts[j] - prev), prev = ts[j];
                for (double& x : hs) x *= v / integral;
                if (lemma_functional(f, g, hs, ts) < bound * (1.0 - 1e-12)) ++violations;
            }
        }
        return std::pair{violations == 0, std::to_string(violations) + " violations"};
    });
    check(out, "isoperimetry", "J_nu of e^r is v + 1", [] {
        auto hexp = std::make_shared<FunctionWeight>([](double r) { return Jet{0.5 * r, 0.5, 0.0}; });
        IsoProfile J = profile_halfline(WeightedModel(RadialProfile::power(0.0, 2), hexp));
        double worst = 0.0;
        for (double v : {0.1, 1.0, 10.0, 1e3}) worst = std::max(worst, rel(J(v), v + 1.0));
        return std::pair{worst < 1e-6, "max rel " + fmt(worst)};
    });

    check(out, "spectral", "closed-form gamma (20 random)", [&] {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            int n = 2 + static_cast<int>(U(rng) * 4);
            double t = std::pow(10.0, -2.0 + 5.0 * U(rng));
            FaberKrahnFunction fk;
            fk.Lambda = [n](double v) { return std::pow(v, -2.0 / n); };
            fk.nonincreasing = fk.integrable_at_zero = true;
            worst = std::max(worst, rel(gamma_inverse(fk, t), std::pow(2.0 * t / n, 0.5 * n)));
        }
        return std::pair{worst < 1e-6, "max rel " + fmt(worst)};
    });
    check(out, "spectral", "flat Dirichlet eigenvalue pi^2", [] {
        double l = lambda1_dirichlet(WeightedModel(RadialProfile::power(0.0, 2)), 1.0, BoundaryCondition::dirichlet);
        double e = rel(l, M_PI * M_PI);
        return std::pair{e < 1e-3, "rel err " + fmt(e)};
    });
    check(out, "spectral", "lambda1 <= Rayleigh bound", [] {
        WeightedModel m(RadialProfile::euclidean(2));
        bool ok = true;
        for (double R : {0.5, 1.0, 2.0, 5.0})
            ok = ok && lambda1_dirichlet(m, R, BoundaryCondition::neumann) <= lambda1_rayleigh_upper(m, R);
        return std::pair{ok, std::string("euclidean n=2")};
    });
    check(out, "spectral", "decay fit of exp(-t^(1/3))", [] {
        std::vector<double> t, v;
        for (int i = 0; i < 21; ++i) {
            t.push_back(10.0 * std::pow(100.0, i / 20.0));
            v.push_back(std::exp(-std::cbrt(t.back())));
        }
        double b = fit_decay_exponent(t, v);
        return std::pair{std::fabs(b - 1.0 / 3.0) < 0.02, "beta " + fmt(b)};
    });

    check(out, "heat_solver", "Neumann mass conservation", [] {
        WeightedModel m(RadialProfile::power(0.0, 2));
        GridSpec g;
        g.r_min = 0.0;
        g.r_max = 10.0;
        g.nodes = 513;
        g.dt = 1e-2;
        g.far_bc = BoundaryCondition::neumann;
        std::vector<double> init(g.nodes, 0.0);
        for (int i = 0; i < g.nodes; ++i) init[i] = std::exp(-std::pow(10.0 * i / (g.nodes - 1) - 3.0, 2));
        SolveResult r = solve(m, g, BoundaryCondition::neumann, init, {1.0});
        return std::pair{r.max_step_mass_defect < 1e-10, "defect " + fmt(r.max_step_mass_defect)};
    });
    check(out, "heat_solver", "flat-line Gaussian at t=1", [] {
        WeightedModel m(RadialProfile::power(0.0, 2).on_full_line());
        GridSpec g;
        g.r_min = -20.0;
        g.r_max = 20.0;
        g.nodes = 2049;
        g.dt = 1e-3;
        std::vector<double> r = grid_nodes(g);
        int mid = g.nodes / 2;
        KernelDiag kd = kernel_diag(m, g, BoundaryCondition::dirichlet, {1.0}, {mid}, {true, false});
        const auto& row = kd.rows[0];
        double worst = 0.0, peak = 1.0 / std::sqrt(4.0 * M_PI);
        for (std::size_t i = 0; i < r.size(); ++i) {
            double x = r[i] - r[mid];
            worst = std::max(worst, std::fabs(row[i] - peak * std::exp(-x * x / 4.0)));
        }
        return std::pair{worst / peak < 1e-2, "sup rel " + fmt(worst / peak)};
    });

    check(out, "cli", "render/parse round trip", [] {
        TaskConfig c = parse_config("[model] family=exp_alpha alpha=0.25 n=3\n[task] task=pipeline\n"
                                    "[time] t_start=10 t_end=1000 t_steps=21\n[grid] nodes=2000 dt=0.05\n");
        return std::pair{parse_config(render_config(c)) == c, std::string("")};
    });
    return out;
}

}  // namespace heatlab
