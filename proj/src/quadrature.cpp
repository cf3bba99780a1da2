#include "heatlab/quadrature.hpp"

#include <cmath>
#include <string>

#include "heatlab/errors.hpp"

namespace heatlab {

namespace {

struct Simpson {
    const ScalarFn& f;
    double atol;
    int max_depth;
    bool exhausted = false;

    double eval(double x) const {
        double y = f(x);
        if (!std::isfinite(y))
            throw NumericFailure("non-finite integrand at x=" + std::to_string(x));
        return y;
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = eval(lm), frm = eval(rm);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        if (depth >= max_depth) {
            exhausted = true;
            return left + right + delta / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, const QuadOptions& opt) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    Simpson s{f, opt.atol, opt.max_depth};
    // Seed with a coarse 16-panel pass so the tolerance is relative to the
    // size of the integral and narrow peaks are not missed.
    const int panels = 16;
    double h = (b - a) / panels;
    double xs[panels + 1], fs[panels + 1];
    for (int i = 0; i <= panels; ++i) {
        xs[i] = (i == panels) ? b : a + i * h;
        fs[i] = s.eval(xs[i]);
    }
    double fm[panels];
    double coarse = 0.0;
    for (int i = 0; i < panels; ++i) {
        fm[i] = s.eval(0.5 * (xs[i] + xs[i + 1]));
        coarse += (xs[i + 1] - xs[i]) / 6.0 * (fs[i] + 4.0 * fm[i] + fs[i + 1]);
    }
    double tol = std::max(opt.atol, opt.rtol * std::fabs(coarse)) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        double whole = (xs[i + 1] - xs[i]) / 6.0 * (fs[i] + 4.0 * fm[i] + fs[i + 1]);
        total += s.recurse(xs[i], xs[i + 1], fs[i], fm[i], fs[i + 1], whole, tol, 0);
    }
    if (s.exhausted)
        throw NumericFailure("adaptive Simpson: depth limit reached on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    return sign * total;
}

TailResult tail_integral(const ScalarFn& f, double a, int dir, double tail_rtol, double first_length,
                         int max_doublings, const QuadOptions& opt) {
    TailResult out;
    double d = dir >= 0 ? 1.0 : -1.0;
    double len = first_length;
    double total = 0.0;
    try {
        total = std::fabs(adaptive_simpson(f, a, a + d * len, opt));
    } catch (const NumericFailure&) {
        out.value = INFINITY;
        return out;
    }
    for (int k = 0; k < max_doublings; ++k) {
        double seg;
        try {
            seg = std::fabs(adaptive_simpson(f, a + d * len, a + d * 2.0 * len, opt));
        } catch (const NumericFailure&) {
            // Overflowing integrand: the tail is infinite for practical purposes.
            out.value = INFINITY;
            out.reach = 2.0 * len;
            out.last_rel_change = INFINITY;
            return out;
        }
        total += seg;
        len *= 2.0;
        out.last_rel_change = total > 0.0 ? seg / total : 0.0;
        if (!std::isfinite(total)) break;
        if (out.last_rel_change < tail_rtol) {
            out.converged = true;
            break;
        }
    }
    out.value = total;
    out.reach = len;
    return out;
}

}  // namespace heatlab
