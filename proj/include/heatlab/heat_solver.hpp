#pragma once

#include <string>
#include <vector>

#include "heatlab/model_geometry.hpp"

namespace heatlab {

enum class Spacing { uniform, graded };
enum class Scheme { crank_nicolson, implicit_euler };
enum class BoundaryCondition { neumann, dirichlet };

struct GridSpec {
    double r_min = 0.0;
    double r_max = 10.0;
    int nodes = 1024;
    Spacing spacing = Spacing::uniform;
    double ratio = 1.0;  // geometric growth of the spacing away from r_min when graded
    double dt = 1e-3;
    Scheme scheme = Scheme::crank_nicolson;
    int rannacher_startup_steps = 2;  // implicit Euler half steps before Crank-Nicolson
    BoundaryCondition far_bc = BoundaryCondition::dirichlet;  // at r_max
    bool auto_extend = false;  // retry once with doubled extent when leakage > 1%
};

std::vector<double> grid_nodes(const GridSpec& grid);

// Flux-form finite volume data: nodal masses w_i = S~(r_i) * dual length and
// conductances k_i = S~(r_{i+1/2}) / (r_{i+1} - r_i). At a pole (S~ = 0) the
// mass uses S~ at the midpoint of the half cell.
struct Discretization {
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> k;
};

Discretization discretize(const WeightedModel& model, const std::vector<double>& r);

struct SolveResult {
    std::vector<double> r;
    std::vector<double> times;
    std::vector<std::vector<double>> fields;
    std::vector<double> mass;  // sum_i w_i u_i at each output time
    double initial_mass = 0.0;
    double far_leakage = 0.0;   // mass that left through r_max
    double left_leakage = 0.0;  // mass that left through a Dirichlet r_min
    double max_step_mass_defect = 0.0;  // per-step |mass change + boundary flux| / mass
    double stability = 0.0;     // dt * max|S~'/S~| / min dr
    bool leakage_warning = false;
    bool extended = false;
};

SolveResult solve(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                  const std::vector<double>& init, const std::vector<double>& times);

struct KernelOptions {
    bool keep_rows = false;  // store q_t(source, .) for every time and source
    bool parallel = true;
};

struct KernelDiag {
    std::vector<double> times;
    std::vector<double> r;
    std::vector<double> w;
    std::vector<int> sources;
    std::vector<double> diag;   // times x sources, q_t(r_i, r_i)
    std::vector<double> mass;   // times x sources
    std::vector<double> cross;  // times x sources x sources, q_t(source_a, source_b)
    std::vector<std::vector<double>> rows;  // (time * nsrc + source) -> row, when kept
    int clamp_count = 0;
    double min_raw_diag = 0.0;

    double at(std::size_t t, std::size_t s) const { return diag[t * sources.size() + s]; }
    double cross_at(std::size_t t, std::size_t a, std::size_t b) const {
        return cross[(t * sources.size() + a) * sources.size() + b];
    }
    double symmetry_error() const;
};

KernelDiag kernel_diag(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                       const std::vector<double>& times, const std::vector<int>& source_nodes,
                       const KernelOptions& opt = {});
// Plain loop over sources; reference for the parallel version.
KernelDiag kernel_diag_serial(const WeightedModel& model, const GridSpec& grid, BoundaryCondition left_bc,
                              const std::vector<double>& times, const std::vector<int>& source_nodes,
                              bool keep_rows = false);

double sup_diag(const KernelDiag& kern, double t);
std::size_t sup_diag_source(const KernelDiag& kern, double t);

void write_field_csv(const std::string& path, const std::vector<double>& r, const std::vector<double>& u);

}  // namespace heatlab
