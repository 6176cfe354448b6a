#pragma once

#include <advs/grover.hpp>
#include <advs/quadrature.hpp>

#include <json.hpp>

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace advs {

enum class SpectrumKind { MarkovianDelta, PowerLaw, Box, Tabulated };

std::string_view to_string(SpectrumKind kind);
SpectrumKind parse_spectrum_kind(std::string_view name);

/// Multipliers of the common spectrum for the (x,x), (x,z), (z,x), (z,z) channel pairs.
struct ChannelWeights {
    double xx = 1.0, xz = 0.0, zx = 0.0, zz = 0.0;
    double get(Channel mu, Channel nu) const;
    bool operator==(const ChannelWeights&) const = default;
};

/// Bath spectral function f(omega). Negative omega excites the system.
///   PowerLaw:  C |omega|^p B(omega, theta) for omega_min <= |omega| <= omega_max
///   Box:       C on [lo, hi]
///   Tabulated: linear interpolation of (omega, f) samples, zero outside
///   MarkovianDelta: flat, correlation strength A * delta(tau)
struct SpectralModel {
    SpectrumKind kind = SpectrumKind::PowerLaw;
    double strength = 1.0;
    double p = 0.0;
    double C = 1.0;
    double omega_min = 0.0;
    double omega_max = 1.0;
    /// Bath temperature; infinity means the thermal (classical) limit B = 1, zero means B = step(omega).
    double theta = std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 0.0;
    std::vector<double> grid_omega, grid_f;
    ChannelWeights channels;
    std::string label;

    static SpectralModel markovian(double A);
    static SpectralModel power_law(double p, double C = 1.0, double omega_min = 0.0, double omega_max = 1.0,
                                   double theta = std::numeric_limits<double>::infinity());
    static SpectralModel box(double lo, double hi, double height = 1.0);
    static SpectralModel tabulated(std::vector<double> omega, std::vector<double> f);

    void validate() const;
};

struct SpectralValue {
    double value;
    /// Set for the Markovian model, which has no band structure (value is A / 2 pi).
    bool flat;
};

SpectralValue f_eval(const SpectralModel& model, double omega);
/// Plain value, zero outside the support. Throws for the flat Markovian model.
double spectral_density(const SpectralModel& model, double omega);

/// Detailed-balance factor: x/(1 - e^-x) with x = omega/theta, i.e. (|w|/theta) nbar below zero and
/// (|w|/theta)(nbar + 1) above; 1 at infinite temperature; step(omega) at zero temperature.
double detailed_balance(double omega, double theta);

/// Disjoint closed intervals where f may be nonzero, ascending.
std::vector<std::pair<double, double>> support(const SpectralModel& model);
/// Interior points where f is not smooth.
std::vector<double> breakpoints(const SpectralModel& model);
/// f(omega) ~ |omega|^p with p <= -1 and no infrared cutoff.
bool infrared_divergent(const SpectralModel& model);

struct PresetParams {
    int D = 3;
    bool zero_temperature = false;
    double C = 1.0;
    double theta = std::numeric_limits<double>::infinity();
    double omega_min = 0.0;
    double omega_max = 1.0;
    double A = 1.0;
};

/// photon_thermal (p = D-1), phonon_thermal (p = D-3), ohmic (p = 0), markovian.
/// Zero-temperature variants raise p by one and set theta = 0.
SpectralModel preset(std::string_view name, const PresetParams& params = {});
/// Parses labels such as "photon_thermal(3)", "phonon_thermal(1,T=0)", "ohmic", "markovian".
SpectralModel preset_from_label(std::string_view label, const PresetParams& base = {});

enum class Topology { CommonBath, IndependentBaths };
std::string_view to_string(Topology t);
Topology parse_topology(std::string_view name);

struct CouplingConfig {
    double lambda = 0.01;
    Topology topology = Topology::IndependentBaths;
    GroverInstance instance{1, 0};

    void validate() const;
    /// Lowest-order engines lose accuracy above this coupling.
    static constexpr double weak_coupling_limit = 0.1;
};

/// Per-pair weights, index 0 = x, 1 = z.
struct EffectiveWeights {
    double topology[2][2];  // sum over qubit pairs of kappa_a^mu kappa_b^nu
    double combined[2][2];  // topology times the model's channel multiplier
    double total;           // sum of combined
};

/// CommonBath: (sum_a kappa_a^mu)(sum_b kappa_b^nu); IndependentBaths: sum_a kappa_a^mu kappa_a^nu,
/// with kappa^x = -1 and kappa_a^z = (-1)^(w_a).
EffectiveWeights effective_weight(const CouplingConfig& config, const SpectralModel& model);
EffectiveWeights effective_weight(const CouplingConfig& config, const ChannelWeights& channels);

/// C(tau) = int f(omega) exp(-i omega tau) d omega on [-tau_max, tau_max], quintic Hermite in tau.
class CorrelationKernel {
public:
    struct Options {
        /// Grid spacing in tau; 0 picks 0.2 / max|omega| over the support.
        double spacing = 0.0;
        double rel_tol = 1e-10;
        unsigned threads = 1;
        EvalBudget* budget = nullptr;
    };

    bool is_delta() const { return delta_; }
    double delta_strength() const { return strength_; }
    double tau_max() const { return tau_max_; }
    double spacing() const { return h_; }
    double error_estimate() const { return err_; }
    /// Largest |omega| in the spectral support.
    double bandwidth() const { return bandwidth_; }
    const ChannelWeights& channels() const { return channels_; }
    std::size_t size() const { return c_.size(); }

    cplx operator()(double tau) const;

    friend CorrelationKernel correlation_kernel(const SpectralModel& model, double tau_max, const Options& opts);

private:
    bool delta_ = false;
    double strength_ = 0.0;
    double tau_max_ = 0.0;
    double h_ = 0.0;
    double err_ = 0.0;
    double bandwidth_ = 0.0;
    ChannelWeights channels_;
    std::vector<cplx> c_, d1_, d2_;
};

CorrelationKernel correlation_kernel(const SpectralModel& model, double tau_max,
                                     const CorrelationKernel::Options& opts);
inline CorrelationKernel correlation_kernel(const SpectralModel& model, double tau_max) {
    return correlation_kernel(model, tau_max, CorrelationKernel::Options{});
}

/// Fixed omega quadrature (15-point Kronrod panels) accurate for exp(-i omega tau), |tau| <= tau_max.
struct OmegaRule {
    std::vector<double> omega, weight, gauss_weight;
};
OmegaRule omega_rule(const SpectralModel& model, double tau_max);
/// Largest |omega| in the support (infinite for the flat model).
double bandwidth(const SpectralModel& model);

nlohmann::json to_json(const SpectralModel& model);
SpectralModel spectral_model_from_json(const nlohmann::json& doc);
/// Two-column (omega, f) CSV; '#' comments and a non-numeric header line are skipped.
SpectralModel load_tabulated_csv(const std::string& path);

}  // namespace advs
