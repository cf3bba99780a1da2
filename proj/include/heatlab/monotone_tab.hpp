#pragma once

#include <vector>

namespace heatlab {

enum class Direction { nondecreasing, nonincreasing };
enum class Interp { step, linear };
enum class Extrapolation { hold, zero };

// Tabulated monotone function. For Interp::step the value on
// [x[k], x[k+1]) is y[k] (right-continuous) and the last value applies
// from x.back() onward; for Interp::linear values are joined linearly.
// Left of x.front() and right of x.back() follow the extrapolation rule.
class MonotoneTab {
public:
    MonotoneTab() = default;
    MonotoneTab(std::vector<double> x, std::vector<double> y, Direction dir,
                Interp interp = Interp::linear, Extrapolation extrap = Extrapolation::hold);

    double operator()(double t) const;
    // Exact integral over [x.front(), inf); infinite when the tail is nonzero.
    double integral() const;
    // Smallest t with value <= s (nonincreasing) or >= s (nondecreasing), linear only.
    double inverse(double s) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    Direction direction() const { return dir_; }
    Interp interp() const { return interp_; }
    Extrapolation extrapolation() const { return extrap_; }
    bool right_continuous() const { return interp_ == Interp::step; }

private:
    std::vector<double> x_, y_;
    Direction dir_ = Direction::nondecreasing;
    Interp interp_ = Interp::linear;
    Extrapolation extrap_ = Extrapolation::hold;
};

}  // namespace heatlab
