#include <advs/oscillatory.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace advs {

AmplitudeEvaluator::AmplitudeEvaluator(const PhaseIntegral& phase, double omega_max, const Options& opts)
    : T_(phase.schedule().T()), omega_max_(std::abs(omega_max)) {
    const Schedule& sch = phase.schedule();
    const GroverInstance& inst = sch.instance();
    const double N = inst.N();
    if (opts.panels_per_period < 1) throw DomainError("panels_per_period must be >= 1");

    double L = 2.0 * std::numbers::pi / ((omega_max_ + 1.0) * opts.panels_per_period);
    // Envelope: g changes over ds ~ gap(s), i.e. dt ~ gap(s) dt/ds.
    const int M = 2000;
    const double stretch = std::asinh(std::sqrt(N));
    double scale = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= M; ++k) {
        const double u = -1.0 + 2.0 * k / M;
        const double s = std::clamp(0.5 + 0.5 * std::sinh(stretch * u) / std::sinh(stretch), 0.0, 1.0);
        scale = std::min(scale, gap(N, s) * sch.dt_ds(s));
    }
    L = std::min(L, 0.5 * scale);
    K_ = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(T_ / L)));
    if (15 * K_ > opts.max_nodes)
        throw BudgetExceeded("oscillatory amplitude: " + std::to_string(15 * K_) +
                             " time nodes exceed the node budget; total phase too large to resolve");
    charge(opts.budget, 15 * K_);
    L_ = T_ / static_cast<double>(K_);

    vr_.resize(15 * K_);
    vi_.resize(15 * K_);
    const double sqrtN = std::sqrt(N);
    for (std::size_t k = 0; k < K_; ++k) {
        for (int i = 0; i < 15; ++i) {
            const double t = std::clamp(node_time(k, i), 0.0, T_);
            const double s = sch.s_of_t(t);
            const double g = (1.0 - s) / (sqrtN * gap(N, s));
            const double phi = phase.at_s(s);
            vr_[15 * k + i] = g * std::cos(phi);
            vi_[15 * k + i] = g * std::sin(phi);
        }
    }
}

double AmplitudeEvaluator::node_time(std::size_t k, int i) const {
    static const auto x = gk15::nodes();
    return (static_cast<double>(k) + 0.5) * L_ + 0.5 * L_ * x[i];
}

QuadratureResult AmplitudeEvaluator::operator()(double omega) const {
    static const auto x = gk15::nodes();
    static const auto wk = gk15::kronrod_weights();
    static const auto wg = gk15::gauss_weights();
    const double h = 0.5 * L_;
    double ar[15], ai[15], br[15], bi[15];
    for (int i = 0; i < 15; ++i) {
        const double c = std::cos(omega * h * x[i]), s = std::sin(omega * h * x[i]);
        ar[i] = wk[i] * c;
        ai[i] = wk[i] * s;
        br[i] = wg[i] * c;
        bi[i] = wg[i] * s;
    }
    const double stepr = std::cos(omega * L_), stepi = std::sin(omega * L_);
    double zr = 0, zi = 0;
    double kr = 0, ki = 0, gr = 0, gi = 0;
    for (std::size_t k = 0; k < K_; ++k) {
        if (k % 64 == 0) {
            const double c = (static_cast<double>(k) + 0.5) * L_;
            zr = std::cos(omega * c);
            zi = std::sin(omega * c);
        }
        const double* vr = &vr_[15 * k];
        const double* vi = &vi_[15 * k];
        double pr = 0, pi = 0, qr = 0, qi = 0;
        for (int i = 0; i < 15; ++i) {
            pr += ar[i] * vr[i] - ai[i] * vi[i];
            pi += ar[i] * vi[i] + ai[i] * vr[i];
        }
        for (int i = 1; i < 15; i += 2) {
            qr += br[i] * vr[i] - bi[i] * vi[i];
            qi += br[i] * vi[i] + bi[i] * vr[i];
        }
        kr += zr * pr - zi * pi;
        ki += zr * pi + zi * pr;
        gr += zr * qr - zi * qi;
        gi += zr * qi + zi * qr;
        const double nz = zr * stepr - zi * stepi;
        zi = zr * stepi + zi * stepr;
        zr = nz;
    }
    QuadratureResult r;
    r.value = cplx(kr, ki) * h;
    r.abs_error_estimate = std::abs(cplx(kr - gr, ki - gi)) * h;
    r.evaluations = 15 * K_;
    return r;
}

QuadratureResult oscillatory_amplitude(const PhaseIntegral& phase, double omega) {
    return AmplitudeEvaluator(phase, std::max(1.0, std::abs(omega)))(omega);
}

std::vector<SaddlePoint> find_saddles(const Schedule& schedule, double omega) {
    std::vector<SaddlePoint> out;
    const double N = schedule.instance().N();
    const double target = -omega;
    if (!(omega < 0.0) || target <= 1.0 / std::sqrt(N) || target >= 1.0) return out;
    auto solve = [&](double lo, double hi, bool decreasing) {
        // gap is monotone on each half; bisection to ~1e-15 in s
        for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const bool above = gap(N, mid) > target;
            if (above == decreasing) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double s1 = solve(0.0, 0.5, true);
    const double s2 = solve(0.5, 1.0, false);
    for (double s : {s1, s2}) {
        const double rate = gap_slope(N, s) * schedule.s_dot(s);
        if (!(std::abs(gap(N, s) - target) < 1e-10)) throw NumericalError("find_saddles: root not converged");
        out.push_back({schedule.t_of_s(s), s, rate,
                       s < 0.5 ? SaddlePoint::Branch::BeforeCrossing : SaddlePoint::Branch::AfterCrossing});
    }
    return out;
}

StationaryPhase stationary_phase_amplitude_sq(const Schedule& schedule, double omega) {
    StationaryPhase sp{0.0, false, find_saddles(schedule, omega)};
    if (sp.saddles.empty()) throw DomainError("stationary phase: no saddle point for this frequency");
    const double N = schedule.instance().N();
    for (const auto& p : sp.saddles) {
        const double g = (1.0 - p.s_star) / (std::sqrt(N) * gap(N, p.s_star));
        sp.value += 2.0 * std::numbers::pi * g * g / std::abs(p.gap_rate);
    }
    sp.degenerate = std::abs(omega) < 2.0 / std::sqrt(N);
    return sp;
}

}  // namespace advs
