#pragma once

#include <advs/phase.hpp>
#include <advs/quadrature.hpp>

#include <vector>

namespace advs {

/// Fixed time quadrature for A(omega) = int_0^T exp(i(omega t + Phi(t))) (1-s)/(sqrt(N) gap) dt.
/// [0, T] is cut into equal panels short enough to resolve both the phase rate |omega + gap| <= omega_max + 1
/// and the envelope; each panel carries the 15 Kronrod nodes (Gauss subset for the error estimate).
class AmplitudeEvaluator {
public:
    struct Options {
        /// Panels per 2 pi of phase at the largest rate.
        int panels_per_period = 2;
        std::size_t max_nodes = 50'000'000;
        EvalBudget* budget = nullptr;
    };

    AmplitudeEvaluator(const PhaseIntegral& phase, double omega_max) : AmplitudeEvaluator(phase, omega_max, Options{}) {}
    AmplitudeEvaluator(const PhaseIntegral& phase, double omega_max, const Options& opts);

    /// Kronrod value with |Kronrod - Gauss| as error estimate.
    QuadratureResult operator()(double omega) const;

    double omega_max() const { return omega_max_; }
    double T() const { return T_; }
    std::size_t panel_count() const { return K_; }
    std::size_t node_count() const { return 15 * K_; }
    double panel_length() const { return L_; }
    /// Node times, panel-major.
    double node_time(std::size_t k, int i) const;
    /// exp(+i Phi) g at node (k, i).
    cplx node_value(std::size_t k, int i) const { return {vr_[15 * k + i], vi_[15 * k + i]}; }

private:
    double T_ = 0.0, L_ = 0.0, omega_max_ = 0.0;
    std::size_t K_ = 0;
    std::vector<double> vr_, vi_;
};

/// Single-shot convenience: builds an evaluator resolving |omega| and evaluates it.
QuadratureResult oscillatory_amplitude(const PhaseIntegral& phase, double omega);

struct SaddlePoint {
    enum class Branch { BeforeCrossing, AfterCrossing };
    double t_star;
    double s_star;
    /// d gap / dt at the saddle.
    double gap_rate;
    Branch branch;
};

/// Solutions of omega + gap(t*) = 0; two for gap_min < -omega < 1, none otherwise.
std::vector<SaddlePoint> find_saddles(const Schedule& schedule, double omega);

struct StationaryPhase {
    double value;
    /// |omega| < 2 gap_min: saddles too close to the minimum for the quadratic approximation.
    bool degenerate;
    std::vector<SaddlePoint> saddles;
};

/// Sum over saddles of 2 pi g*^2 / |d gap/dt| (incoherent). Throws DomainError without saddles.
StationaryPhase stationary_phase_amplitude_sq(const Schedule& schedule, double omega);

}  // namespace advs
