#pragma once

#include <advs/oscillatory.hpp>
#include <advs/phase.hpp>
#include <advs/spectral.hpp>

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace advs {

enum class Method { TimeDomain, FrequencyDomain, Markovian, Asymptotic, BruteForce };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Second-order population of the first excited state at t = T.
struct FailureEstimate {
    double value = 0.0;
    Method method = Method::FrequencyDomain;
    double numerical_error = 0.0;
    /// Contribution of each channel pair, index 0 = x, 1 = z.
    double breakdown[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    /// Asymptotic method only: the band around omega = 0 and the saddle-point part.
    double term1 = 0.0, term2 = 0.0;
    /// Above 0.5: second-order perturbation theory is outside its range.
    bool unreliable = false;
    std::vector<std::string> warnings;
    std::size_t evaluations = 0;
};

struct FailureOptions {
    double rel_tol = 1e-8;
    int panels_per_period = 2;
    /// Time-domain engine: number of times the panel length may be halved to meet rel_tol.
    int max_refinements = 2;
    double kernel_spacing = 0.0;
    unsigned threads = 1;
    std::size_t max_evaluations = 20'000'000;
    EvalBudget* budget = nullptr;
};

/// lambda^2 sum_{mu nu} w_{mu nu} int int C(t1 - t2) m(t1) conj(m(t2)) dt1 dt2 on a product Kronrod grid.
FailureEstimate p1_time_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                               const CorrelationKernel& kernel, const FailureOptions& opts = {});
/// Builds the kernel on [-T, T] first.
FailureEstimate p1_time_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                               const SpectralModel& model, const FailureOptions& opts = {});

/// lambda^2 W int f(omega) |A(omega)|^2 d omega.
FailureEstimate p1_frequency_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                                    const SpectralModel& model, const FailureOptions& opts = {});

/// lambda^2 A W int_0^T (1-s)^2 / (N gap^2) dt.
FailureEstimate p1_markovian(const Schedule& schedule, const CouplingConfig& coupling, double A,
                             const ChannelWeights& channels = {}, const FailureOptions& opts = {});

/// term1 = lambda^2 W N int_{-gmin}^{gmin} f,
/// term2 = lambda^2 W pi/(2N) int_{gmin}^{1} f(-omega) / (omega^2 sdot(t*)) with 1/sdot averaged over both saddles.
FailureEstimate p1_asymptotic(const Schedule& schedule, const CouplingConfig& coupling, const SpectralModel& model,
                              const FailureOptions& opts = {});

/// lambda^2 W f(-gmin) / gmin.
double p1_scaling_law(const GroverInstance& instance, const SpectralModel& model, const CouplingConfig& coupling);

nlohmann::json to_json(const FailureEstimate& e);

}  // namespace advs
