#include <advs/phase.hpp>

#include <algorithm>
#include <cmath>

namespace advs {

PhaseIntegral::PhaseIntegral(const Schedule& schedule, const Options& opts) : schedule_(schedule) {
    const double N = schedule.instance().N();
    CumulativeTable::Options o;
    o.rel_tol = opts.rel_tol;
    o.max_nodes = opts.max_nodes;
    o.budget = opts.budget;
    o.breakpoints = schedule.kinks();
    const double gmin = 1.0 / std::sqrt(N);
    for (double d = 0.25 * gmin; d < 0.5; d *= 2.0) {
        o.seed_nodes.push_back(0.5 - d);
        o.seed_nodes.push_back(0.5 + d);
    }
    o.seed_nodes.push_back(0.5);
    const Schedule& sch = schedule_;
    table_ = CumulativeTable::build([&](double s) { return gap(N, s) * sch.dt_ds(s); }, 0.0, 1.0, o);
}

double PhaseIntegral::at_s(double s) const {
    require_unit_interval(s, "phase");
    return table_.value(s);
}

double PhaseIntegral::at_time(double t) const {
    if (!(t >= 0.0 && t <= schedule_.T())) throw DomainError("phase: t must lie in [0, T]");
    if (t == 0.0) return 0.0;
    return table_.value(schedule_.s_of_t(t));
}

MatrixElement matrix_element(const PhaseIntegral& phase, int qubit, Channel channel, double t) {
    const Schedule& sch = phase.schedule();
    const GroverInstance& inst = sch.instance();
    if (!(t >= 0.0 && t <= sch.T())) throw DomainError("matrix_element: t must lie in [0, T]");
    const double s = sch.s_of_t(t);
    const double phi = phase.at_time(t);
    const cplx rot = std::polar(1.0, -phi);
    const int eta = inst.marked_bit(qubit) == 0 ? 1 : -1;
    MatrixElement m{};
    if (channel == Channel::Y) {
        m.magnitude = 1.0 / std::sqrt(inst.N() - 1.0);
        m.value = cplx(0.0, eta) * rot * m.magnitude;
        m.coefficient = 0.0;
        m.relative_sign = 0;
        m.suppressed = true;
        return m;
    }
    m.magnitude = transition_amplitude(inst, s);
    m.coefficient = channel_coefficient(inst, qubit, channel);
    m.value = m.coefficient * rot * m.magnitude;
    m.relative_sign = channel == Channel::X ? 1 : -eta;
    m.suppressed = false;
    return m;
}

double adiabatic_error_estimate(const Schedule& schedule) {
    const GroverInstance& inst = schedule.instance();
    const double N = inst.N();
    auto F = [&](double s) {
        const double g = gap(N, s);
        return schedule.s_dot(s) * adiabatic_coupling(inst, s) / (g * g);
    };
    const int M = 4000;
    const double stretch = std::asinh(std::sqrt(N));
    double best = 0.0, best_s = 0.5;
    for (int k = 0; k <= M; ++k) {
        const double u = -1.0 + 2.0 * k / M;
        const double s = std::clamp(0.5 + 0.5 * std::sinh(stretch * u) / std::sinh(stretch), 0.0, 1.0);
        const double v = F(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }
    // local polish on a fine uniform stencil around the best sample
    const double h = 2.0 / (std::sqrt(N) * M);
    for (int k = -200; k <= 200; ++k) {
        const double s = std::clamp(best_s + k * h * 0.01, 0.0, 1.0);
        best = std::max(best, F(s));
    }
    return best;
}

}  // namespace advs
