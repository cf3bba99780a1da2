#pragma once

#include <functional>

namespace heatlab {

using ScalarFn = std::function<double(double)>;

struct QuadOptions {
    double rtol = 1e-8;
    double atol = 1e-14;
    int max_depth = 48;
};

// Adaptive Simpson on [a, b]. Throws NumericFailure on non-finite integrand
// values or when the recursion limit is hit before the tolerance is met.
double adaptive_simpson(const ScalarFn& f, double a, double b, const QuadOptions& opt = {});

struct TailResult {
    double value = 0.0;
    bool converged = false;
    double last_rel_change = 0.0;
    double reach = 0.0;  // truncation length when the loop stopped
};

// Integral of f over [a, a + dir*inf) by geometric truncation: segments
// [L, 2L] are added until a segment changes the total by less than tail_rtol.
TailResult tail_integral(const ScalarFn& f, double a, int dir, double tail_rtol = 1e-6,
                         double first_length = 1.0, int max_doublings = 60,
                         const QuadOptions& opt = {});

}  // namespace heatlab
