#pragma once

#include <advs/failure.hpp>
#include <advs/schedule.hpp>
#include <advs/spectral.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

// Brute-force reference paths. Everything here is built from the Hamiltonian
// H(s) = (1-s)(1 - |psi0><psi0|) + s(1 - |w><w|) and plain time stepping; none of the
// closed-form gap or matrix-element expressions are used.
namespace advs::oracle {

struct FullState {
    std::vector<cplx> amplitudes;
    double t = 0.0;
    double norm() const;
};

/// Default step count: 200 steps per 2 pi of phase at unit gap over [0, T], at least 10^4.
std::size_t default_steps(const Schedule& schedule);

/// Fixed-step midpoint exponential integration of the full 2^n state from |psi0>.
/// The matvec uses the rank-two structure of H; n <= 12.
FullState evolve_full(const Schedule& schedule, std::size_t steps = 0);

/// Norm of the component of `state` orthogonal to span{|w>, |psi0>}.
double subspace_leakage(const FullState& state, const GroverInstance& instance);

struct Propagator2x2 {
    Eigen::Matrix2cd U;
    std::size_t steps = 0;
    /// ||U^dagger U - 1||_max
    double unitarity_error = 0.0;
};

/// U(t) on span{|w>, |w_perp>} (ordered w, w_perp) by midpoint exponential steps of size <= T/steps.
Propagator2x2 propagator_2x2(const Schedule& schedule, double t, std::size_t steps = 0);

/// U at each of the ascending `times`, stepping with at most `max_step` in between.
std::vector<Eigen::Matrix2cd> propagator_path(const Schedule& schedule, const std::vector<double>& times,
                                              double max_step = 0.0);

enum class ElementMode {
    /// sigma^x -> |w_perp><w_perp|, sigma^z -> eta |w><w|, normalized by <w_perp|psi0>.
    LeadingOrder,
    /// Exact projection of sigma_a^mu onto span{|w>, |w_perp>}.
    Exact
};

/// <psi0| U^dagger sigma U |E1(0)> along the given times, with E1(0) the excited state of H(0).
std::vector<cplx> propagated_matrix_elements(const Schedule& schedule, int qubit, Channel channel,
                                             const std::vector<double>& times, ElementMode mode,
                                             double max_step = 0.0);

/// Correlation function used by the brute-force double sum.
struct BruteKernel {
    std::function<cplx(double)> C;
    bool delta = false;
    double strength = 0.0;
    ChannelWeights channels;
};

/// Closed-form C(tau) for box spectra, power laws with p in {0, 1, 2} at infinite temperature, and the delta kernel.
BruteKernel analytic_kernel(const SpectralModel& model);

/// Trapezoid double sum on `grid_points` equally spaced times. Delta kernels reduce to the diagonal.
FailureEstimate p1_brute_double_integral(const Schedule& schedule, const CouplingConfig& coupling,
                                         const BruteKernel& kernel, std::size_t grid_points,
                                         ElementMode mode = ElementMode::LeadingOrder);

}  // namespace advs::oracle
