#pragma once

#include <advs/errors.hpp>
#include <advs/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace advs {

/// y(x) = ∫_{x0}^{x} d(u) du for a positive density d, tabulated on an adaptively refined grid and
/// interpolated by cubic Hermite splines whose node slopes are the exact one-sided densities.
/// Immutable once built.
class CumulativeTable {
public:
    struct Options {
        double rel_tol = 1e-12;
        std::size_t max_nodes = 100'000;
        std::vector<double> seed_nodes;   // initial partition (refined further)
        std::vector<double> breakpoints;  // density may jump here
        EvalBudget* budget = nullptr;
    };

    CumulativeTable() = default;

    template <class D>
    static CumulativeTable build(D&& density, double x0, double x1, const Options& opts);

    double value(double x) const;
    double slope(double x) const;
    /// Solves value(x) = y for x; y must lie in [0, total()].
    double inverse(double y) const;

    double total() const { return y_.empty() ? 0.0 : y_.back(); }
    double lower() const { return x_.front(); }
    double upper() const { return x_.back(); }
    std::size_t node_count() const { return x_.size(); }
    double error_estimate() const { return err_; }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t interval_of(double x) const;
    double hermite(std::size_t i, double x) const;
    double hermite_slope(std::size_t i, double x) const;

    std::vector<double> x_, y_;
    std::vector<double> dr_;  // slope at x_i, approached from the right
    std::vector<double> dl_;  // slope at x_i, approached from the left
    double err_ = 0.0;
};

template <class D>
CumulativeTable CumulativeTable::build(D&& density, double x0, double x1, const Options& opts) {
    if (!(x0 < x1)) throw DomainError("CumulativeTable: empty range");
    std::vector<double> seeds{x0, x1};
    for (double s : opts.seed_nodes)
        if (s > x0 && s < x1) seeds.push_back(s);
    for (double s : opts.breakpoints)
        if (s > x0 && s < x1) seeds.push_back(s);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    auto inside_right = [](double a, double b) { return std::nextafter(a, b); };
    auto dens = [&](double x) {
        const double v = density(x);
        if (!(v > 0.0) || !std::isfinite(v)) throw NumericalError("CumulativeTable: density must be positive and finite");
        return v;
    };

    double estimate = 0.0;
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i) {
        charge(opts.budget, 15);
        estimate += gk15_panel(dens, seeds[i], seeds[i + 1]).kronrod.real();
    }
    const double tol = opts.rel_tol * std::abs(estimate);
    const double length = x1 - x0;

    CumulativeTable t;
    t.x_.push_back(x0);
    t.y_.push_back(0.0);
    t.dr_.push_back(dens(inside_right(x0, x1)));
    t.dl_.push_back(t.dr_.back());

    std::vector<std::pair<double, double>> pending;
    for (std::size_t i = seeds.size() - 1; i > 0; --i) pending.emplace_back(seeds[i - 1], seeds[i]);

    double quad_err = 0.0, interp_err = 0.0;
    while (!pending.empty()) {
        const auto [a, b] = pending.back();
        pending.pop_back();
        const double m = 0.5 * (a + b);
        charge(opts.budget, 32);
        const PanelEstimate left = gk15_panel(dens, a, m);
        const PanelEstimate right = gk15_panel(dens, m, b);
        const double ya = t.y_.back();
        const double yb = ya + left.kronrod.real() + right.kronrod.real();
        const double da = t.dr_.back();
        const double db = dens(std::nextafter(b, a));
        const double h = b - a;
        const double predicted = 0.5 * (ya + yb) + h * (da - db) / 8.0;
        const double mismatch = std::abs(predicted - (ya + left.kronrod.real()));
        const double qerr = left.error + right.error;
        const bool tiny = h <= 1e-14 * std::max(1.0, std::abs(m));
        if (tiny || (mismatch <= tol && qerr <= tol * std::max(h / length, 1e-6))) {
            t.x_.push_back(b);
            t.y_.push_back(yb);
            t.dl_.push_back(db);
            t.dr_.push_back(b < x1 ? dens(inside_right(b, x1)) : db);
            quad_err += qerr;
            interp_err = std::max(interp_err, mismatch);
            if (t.x_.size() > opts.max_nodes)
                throw BudgetExceeded("CumulativeTable: node budget exceeded");
        } else {
            pending.emplace_back(m, b);
            pending.emplace_back(a, m);
        }
    }
    t.err_ = quad_err + interp_err;
    return t;
}

}  // namespace advs
