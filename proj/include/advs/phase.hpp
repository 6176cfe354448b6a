#pragma once

#include <advs/grover.hpp>
#include <advs/interpolant.hpp>
#include <advs/schedule.hpp>

namespace advs {

/// Accumulated dynamical phase Phi(t) = int_0^t gap(tau) dtau, tabulated over s.
class PhaseIntegral {
public:
    struct Options {
        double rel_tol = 1e-12;
        std::size_t max_nodes = 100'000;
        EvalBudget* budget = nullptr;
    };

    explicit PhaseIntegral(const Schedule& schedule) : PhaseIntegral(schedule, Options{}) {}
    PhaseIntegral(const Schedule& schedule, const Options& opts);

    const Schedule& schedule() const { return schedule_; }
    double at_time(double t) const;
    double at_s(double s) const;
    double total() const { return table_.total(); }
    std::size_t node_count() const { return table_.node_count(); }
    double error_estimate() const { return table_.error_estimate(); }

private:
    Schedule schedule_;
    CumulativeTable table_;
};

/// <w_perp|sigma_a^mu(t)|w> in the large-N two-level description.
struct MatrixElement {
    cplx value;
    double magnitude;
    /// value = coefficient * exp(-i Phi) * magnitude for x and z.
    double coefficient;
    /// Sign of this channel relative to the x channel: +1 for x, (-1)^(w_a+1) for z.
    int relative_sign;
    /// y channel: O(1/sqrt(N)) and excluded from the failure engines.
    bool suppressed;
};

MatrixElement matrix_element(const PhaseIntegral& phase, int qubit, Channel channel, double t);

/// max_t |<E1|dH/dt|E0>| / gap^2, sampled densely in s and polished around the maximum.
double adiabatic_error_estimate(const Schedule& schedule);

}  // namespace advs
