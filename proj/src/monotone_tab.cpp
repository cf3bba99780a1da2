#include "heatlab/monotone_tab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatlab/errors.hpp"

namespace heatlab {

MonotoneTab::MonotoneTab(std::vector<double> x, std::vector<double> y, Direction dir, Interp interp,
                         Extrapolation extrap)
    : x_(std::move(x)), y_(std::move(y)), dir_(dir), interp_(interp), extrap_(extrap) {
    if (x_.empty() || x_.size() != y_.size())
        throw ArgumentError("MonotoneTab: breakpoints and values must be nonempty and equal length");
    for (std::size_t k = 1; k < x_.size(); ++k) {
        if (!(x_[k] > x_[k - 1]))
            throw ArgumentError("MonotoneTab: breakpoints not increasing at index " + std::to_string(k));
        bool ok = dir_ == Direction::nondecreasing ? y_[k] >= y_[k - 1] : y_[k] <= y_[k - 1];
        if (!ok)
            throw ArgumentError("MonotoneTab: values violate declared direction at index " +
                                std::to_string(k));
    }
}

double MonotoneTab::operator()(double t) const {
    if (t < x_.front()) return extrap_ == Extrapolation::hold ? y_.front() : 0.0;
    if (t >= x_.back()) {
        if (interp_ == Interp::step) return y_.back();
        return extrap_ == Extrapolation::hold ? y_.back() : 0.0;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    if (interp_ == Interp::step) return y_[k];
    double w = (t - x_[k]) / (x_[k + 1] - x_[k]);
    return y_[k] + w * (y_[k + 1] - y_[k]);
}

double MonotoneTab::integral() const {
    double total = 0.0;
    if (interp_ == Interp::step) {
        for (std::size_t k = 0; k + 1 < x_.size(); ++k) total += y_[k] * (x_[k + 1] - x_[k]);
        if (y_.back() != 0.0) return INFINITY;
        return total;
    }
    for (std::size_t k = 0; k + 1 < x_.size(); ++k)
        total += 0.5 * (y_[k] + y_[k + 1]) * (x_[k + 1] - x_[k]);
    if (extrap_ == Extrapolation::hold && y_.back() != 0.0) return INFINITY;
    return total;
}

double MonotoneTab::inverse(double s) const {
    if (interp_ != Interp::linear) throw UnsupportedError("MonotoneTab::inverse needs linear interpolation");
    bool inc = dir_ == Direction::nondecreasing;
    if (inc ? s <= y_.front() : s >= y_.front()) return x_.front();
    if (inc ? s > y_.back() : s < y_.back()) throw RangeError("MonotoneTab::inverse: value outside table");
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        bool past = inc ? y_[mid] >= s : y_[mid] <= s;
        if (past) hi = mid; else lo = mid;
    }
    double dy = y_[hi] - y_[lo];
    if (dy == 0.0) return x_[lo];
    return x_[lo] + (s - y_[lo]) / dy * (x_[hi] - x_[lo]);
}

}  // namespace heatlab
