#pragma once

#include <advs/errors.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

namespace advs {

using cplx = std::complex<double>;

/// Shared cap on integrand evaluations. Thread-safe; throws BudgetExceeded once exhausted.
class EvalBudget {
public:
    explicit EvalBudget(std::size_t limit = std::numeric_limits<std::size_t>::max()) : limit_(limit) {}
    EvalBudget(const EvalBudget&) = delete;
    EvalBudget& operator=(const EvalBudget&) = delete;

    void charge(std::size_t n);
    std::size_t used() const { return used_.load(std::memory_order_relaxed); }
    std::size_t limit() const { return limit_; }

    /// Reads ADVS_BUDGET; unlimited when unset.
    static std::size_t limit_from_env();

private:
    std::atomic<std::size_t> used_{0};
    std::size_t limit_;
};

inline void charge(EvalBudget* budget, std::size_t n) {
    if (budget != nullptr) budget->charge(n);
}

struct QuadratureResult {
    cplx value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

struct QuadOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    std::size_t max_evaluations = 4'000'000;
    /// Interior points where the integrand may be non-smooth; the initial partition splits there.
    std::vector<double> breakpoints;
    EvalBudget* budget = nullptr;
};

// 7-point Gauss / 15-point Kronrod pair on [-1, 1]. Index 1,3,5,7 of the Kronrod abscissae are the Gauss nodes.
namespace gk15 {
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Abscissae of the 15 Kronrod nodes in ascending order on [-1,1].
std::array<double, 15> nodes();
/// Kronrod weights aligned with nodes().
std::array<double, 15> kronrod_weights();
/// Gauss weights aligned with nodes(); zero on Kronrod-only nodes.
std::array<double, 15> gauss_weights();
}  // namespace gk15

struct PanelEstimate {
    cplx kronrod;
    cplx gauss;
    double error = 0.0;
};

/// QUADPACK-style error heuristic from the raw Kronrod/Gauss difference.
double quadpack_error(double diff, double resabs, double resasc);

template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    auto eval = [&](double x) -> cplx {
        const cplx v = cplx(f(x));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("integrand returned a non-finite value");
        return v;
    };
    std::array<cplx, 15> fv;
    fv[7] = eval(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk15::xk[i];
        fv[i] = eval(c - dx);
        fv[14 - i] = eval(c + dx);
    }
    cplx k = fv[7] * gk15::wk[7];
    cplx g = fv[7] * gk15::wg[3];
    double resabs = std::abs(fv[7]) * gk15::wk[7];
    for (int i = 0; i < 7; ++i) {
        const cplx pair = fv[i] + fv[14 - i];
        k += pair * gk15::wk[i];
        resabs += (std::abs(fv[i]) + std::abs(fv[14 - i])) * gk15::wk[i];
        if (i % 2 == 1) g += pair * gk15::wg[i / 2];
    }
    const cplx mean = 0.5 * k;
    double resasc = std::abs(fv[7] - mean) * gk15::wk[7];
    for (int i = 0; i < 7; ++i)
        resasc += (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean)) * gk15::wk[i];
    const double ah = std::abs(h);
    return {k * h, g * h, quadpack_error(std::abs(k - g) * ah, resabs * ah, resasc * ah)};
}

/// Globally adaptive Gauss-Kronrod quadrature of a real- or complex-valued integrand.
/// Returns converged=false (never throws) when max_evaluations is reached before the tolerance.
template <class F>
QuadratureResult adaptive_quad(F&& f, double a, double b, const QuadOptions& opts = {}) {
    if (!(a <= b)) throw DomainError("adaptive_quad: requires a <= b");
    QuadratureResult out;
    if (a == b) return out;

    struct Interval {
        double a, b;
        cplx value;
        double error;
        bool operator<(const Interval& o) const { return error < o.error; }
    };

    std::vector<double> edges{a};
    for (double p : opts.breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Interval> heap;
    std::vector<Interval> done;
    cplx total{0.0, 0.0};
    double total_err = 0.0;
    auto push = [&](double lo, double hi) {
        charge(opts.budget, 15);
        const PanelEstimate p = gk15_panel(f, lo, hi);
        out.evaluations += 15;
        total += p.kronrod;
        total_err += p.error;
        heap.push({lo, hi, p.kronrod, p.error});
    };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) push(edges[i], edges[i + 1]);

    const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    while (!heap.empty()) {
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (total_err <= tol) break;
        if (out.evaluations + 30 > opts.max_evaluations) {
            out.converged = false;
            break;
        }
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a <= min_width || mid <= worst.a || mid >= worst.b) {
            done.push_back(worst);  // unsplittable
            continue;
        }
        total -= worst.value;
        total_err -= worst.error;
        push(worst.a, mid);
        push(mid, worst.b);
    }
    // Resum in interval order so the result does not depend on running-sum cancellation.
    while (!heap.empty()) {
        done.push_back(heap.top());
        heap.pop();
    }
    std::sort(done.begin(), done.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    cplx sum{0.0, 0.0};
    double err = 0.0;
    for (const auto& iv : done) {
        sum += iv.value;
        err += iv.error;
    }
    out.value = sum;
    out.abs_error_estimate = err;
    if (out.converged) out.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(sum));
    return out;
}

/// Real part convenience for real integrands.
template <class F>
double integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
    const QuadratureResult r = adaptive_quad(std::forward<F>(f), a, b, opts);
    if (!r.converged) throw NumericalError("quadrature did not reach the requested tolerance");
    return r.value.real();
}

}  // namespace advs
