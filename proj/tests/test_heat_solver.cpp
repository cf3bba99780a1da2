#include <cmath>
#include <vector>

#include "doctest.h"
#include "heatlab/errors.hpp"
#include "heatlab/heat_solver.hpp"

using namespace heatlab;

namespace {

WeightedModel line() { return WeightedModel(RadialProfile::power(0.0, 2).on_full_line()); }

GridSpec line_grid(int nodes, double dt) {
    GridSpec g;
    g.r_min = -20.0;
    g.r_max = 20.0;
    g.nodes = nodes;
    g.dt = dt;
    return g;
}

double gaussian_error(int nodes, double dt) {
    GridSpec g = line_grid(nodes, dt);
    int mid = nodes / 2;
    KernelDiag kd = kernel_diag(line(), g, BoundaryCondition::dirichlet, {1.0}, {mid}, {true, false});
    std::vector<double> r = grid_nodes(g);
    double worst = 0.0, peak = 1.0 / std::sqrt(4.0 * M_PI);
    for (std::size_t i = 0; i < r.size(); ++i)
        worst = std::max(worst, std::fabs(kd.rows[0][i] - peak * std::exp(-r[i] * r[i] / 4.0)));
    return worst / peak;
}

}  // namespace

TEST_CASE("grid nodes") {
    GridSpec g;
    g.r_min = 0.0;
    g.r_max = 10.0;
    g.nodes = 101;
    std::vector<double> r = grid_nodes(g);
    CHECK(r.size() == 101);
    CHECK(r.front() == 0.0);
    CHECK(r.back() == doctest::Approx(10.0));
    g.spacing = Spacing::graded;
    g.ratio = 1.02;
    r = grid_nodes(g);
    CHECK(r.back() == doctest::Approx(10.0));
    CHECK(r[2] - r[1] == doctest::Approx(1.02 * (r[1] - r[0])));
    g.nodes = 10;
    CHECK_THROWS_AS(grid_nodes(g), ArgumentError);
}

TEST_CASE("Gaussian kernel on the flat line") {
    CHECK(gaussian_error(4097, 1e-3) <= 1e-2);
    WeightedModel m = line();
    GridSpec g = line_grid(4097, 1e-3);
    std::vector<int> src{1024, 2048, 3072};
    KernelDiag kd = kernel_diag(m, g, BoundaryCondition::dirichlet, {1.0, 2.0}, src);
    for (std::size_t s = 0; s < src.size(); ++s) CHECK(kd.at(0, s) == doctest::Approx(1.0 / std::sqrt(4 * M_PI)).epsilon(1e-2));
    CHECK(sup_diag(kd, 1.0) == doctest::Approx(1.0 / std::sqrt(4 * M_PI)).epsilon(1e-2));
    CHECK(sup_diag(kd, 1.0) == kd.at(0, sup_diag_source(kd, 1.0)));
    CHECK(sup_diag(kd, 2.0) < sup_diag(kd, 1.0));
    CHECK_THROWS_AS(sup_diag(kd, 3.0), ArgumentError);
}

TEST_CASE("Crank-Nicolson converges at second order") {
    double e1 = gaussian_error(1025, 8e-3), e2 = gaussian_error(2049, 4e-3);
    double ratio = e1 / e2;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("Chapman-Kolmogorov on the grid") {
    GridSpec g = line_grid(2049, 2e-3);
    int mid = 1024;
    KernelDiag kd = kernel_diag(line(), g, BoundaryCondition::dirichlet, {0.75, 1.5}, {mid}, {true, true});
    double ck = 0.0;
    for (std::size_t j = 0; j < kd.w.size(); ++j) ck += kd.rows[0][j] * kd.rows[0][j] * kd.w[j];
    CHECK(ck == doctest::Approx(kd.rows[1][mid]).epsilon(1e-2));
}

TEST_CASE("mass under Neumann and Dirichlet boundaries") {
    WeightedModel flat(RadialProfile::power(0.0, 2));
    GridSpec g;
    g.r_min = 0.0;
    g.r_max = 10.0;
    g.nodes = 513;
    g.dt = 1e-2;
    g.far_bc = BoundaryCondition::neumann;
    std::vector<double> r = grid_nodes(g), init(g.nodes);
    for (int i = 0; i < g.nodes; ++i) init[i] = std::exp(-(r[i] - 3.0) * (r[i] - 3.0));
    SolveResult n = solve(flat, g, BoundaryCondition::neumann, init, {0.5, 1.0, 2.0});
    CHECK(n.max_step_mass_defect < 1e-10);
    for (double m : n.mass) CHECK(m == doctest::Approx(n.initial_mass).epsilon(1e-9));
    SolveResult d = solve(flat, g, BoundaryCondition::dirichlet, init, {0.5, 1.0, 2.0});
    CHECK(d.mass[0] < d.initial_mass);
    CHECK(d.mass[1] < d.mass[0]);
    CHECK(d.mass[2] < d.mass[1]);
    CHECK(d.left_leakage > 0.0);
}

TEST_CASE("far leakage is reported") {
    WeightedModel flat(RadialProfile::power(0.0, 2));
    GridSpec g;
    g.r_min = 0.0;
    g.r_max = 3.0;
    g.nodes = 256;
    g.dt = 1e-2;
    std::vector<double> init(g.nodes, 0.0);
    init[128] = 1.0;
    SolveResult s = solve(flat, g, BoundaryCondition::neumann, init, {5.0});
    CHECK(s.leakage_warning);
    CHECK(s.far_leakage > 0.01 * s.initial_mass);
    g.auto_extend = true;
    SolveResult e = solve(flat, g, BoundaryCondition::neumann, init, {5.0});
    CHECK(e.extended);
}

TEST_CASE("kernel symmetry, positivity and serial reference") {
    WeightedModel m(RadialProfile::two_end(RadialProfile::exp_alpha(0.5, 2), RadialProfile::hyperbolic(2)));
    GridSpec g;
    g.r_min = -10.0;
    g.r_max = 30.0;
    g.nodes = 1024;
    g.dt = 0.02;
    std::vector<int> src{100, 250, 400, 600, 900};
    std::vector<double> times{0.1, 1.0, 10.0};
    KernelDiag par = kernel_diag(m, g, BoundaryCondition::dirichlet, times, src, {true, true});
    KernelDiag ser = kernel_diag_serial(m, g, BoundaryCondition::dirichlet, times, src, true);
    CHECK(par.diag == ser.diag);
    CHECK(par.cross == ser.cross);
    CHECK(par.rows == ser.rows);
    CHECK(par.symmetry_error() < 1e-6);
    CHECK(par.min_raw_diag > -1e-12);
    for (double d : par.diag) CHECK(d >= 0.0);
    for (const auto& row : par.rows)
        for (double u : row) CHECK(u >= -1e-12);
}

TEST_CASE("Dirichlet domain kernel is dominated by the whole-line kernel") {
    WeightedModel m = line();
    GridSpec whole = line_grid(2049, 1e-2);
    GridSpec half = whole;
    half.r_min = 0.0;
    half.nodes = 1025;
    std::vector<double> times{0.5, 2.0, 8.0};
    std::vector<int> hs{50, 200, 600}, ws{1074, 1224, 1624};
    KernelDiag qo = kernel_diag(m, half, BoundaryCondition::dirichlet, times, hs);
    KernelDiag q = kernel_diag(m, whole, BoundaryCondition::dirichlet, times, ws);
    for (std::size_t t = 0; t < times.size(); ++t)
        for (std::size_t s = 0; s < hs.size(); ++s) CHECK(qo.at(t, s) <= q.at(t, s) * (1.0 + 1e-9));
}

TEST_CASE("bad solver input") {
    WeightedModel flat(RadialProfile::power(0.0, 2));
    GridSpec g;
    std::vector<double> init(g.nodes, 0.0);
    init[3] = -1.0;
    CHECK_THROWS_AS(solve(flat, g, BoundaryCondition::neumann, init, {1.0}), ArgumentError);
    init[3] = 1.0;
    CHECK_THROWS_AS(solve(flat, g, BoundaryCondition::neumann, init, {2.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(kernel_diag(flat, g, BoundaryCondition::neumann, {1.0}, {g.nodes + 5}), ArgumentError);
}
