#include <advs/interpolant.hpp>

namespace advs {

std::size_t CumulativeTable::interval_of(double x) const {
    if (x_.size() < 2) throw NumericalError("CumulativeTable: not built");
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CumulativeTable::hermite(std::size_t i, double x) const {
    const double h = x_[i + 1] - x_[i];
    const double u = (x - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * y_[i] + h10 * h * dr_[i] + h01 * y_[i + 1] + h11 * h * dl_[i + 1];
}

double CumulativeTable::hermite_slope(std::size_t i, double x) const {
    const double h = x_[i + 1] - x_[i];
    const double u = (x - x_[i]) / h;
    const double u2 = u * u;
    return (6 * u2 - 6 * u) / h * (y_[i] - y_[i + 1]) + (3 * u2 - 4 * u + 1) * dr_[i] + (3 * u2 - 2 * u) * dl_[i + 1];
}

double CumulativeTable::value(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    return hermite(interval_of(x), x);
}

double CumulativeTable::slope(double x) const { return hermite_slope(interval_of(x), x); }

double CumulativeTable::inverse(double y) const {
    if (y <= 0.0) return x_.front();
    if (y >= y_.back()) return x_.back();
    const auto it = std::upper_bound(y_.begin(), y_.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - y_.begin()) - 1;
    double lo = x_[i], hi = x_[i + 1];
    double x = lo + (hi - lo) * (y - y_[i]) / (y_[i + 1] - y_[i]);
    for (int iter = 0; iter < 100; ++iter) {
        const double r = hermite(i, x) - y;
        if (r > 0) hi = x; else lo = x;
        if (r == 0.0 || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
        const double d = hermite_slope(i, x);
        double next = (d > 0) ? x - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    return x;
}

}  // namespace advs
