#pragma once

#include <advs/failure.hpp>
#include <advs/schedule.hpp>
#include <advs/spectral.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace advs {

struct SweepSpec {
    std::vector<int> n_list;
    std::vector<ScheduleKind> schedules;
    std::vector<SpectralModel> presets;
    double lambda = 0.01;
    double epsilon = 0.1;
    std::vector<Method> methods{Method::FrequencyDomain};
    Topology topology = Topology::IndependentBaths;
    /// "balanced" (0101...), "zeros" or "ones".
    std::string marked = "balanced";
    /// Timed executions per row; the median is reported.
    int repetitions = 1;
    /// Worker threads; 0 = hardware concurrency.
    unsigned jobs = 0;
    /// Without timing the seconds column stays empty so that outputs are byte-reproducible.
    bool timing = false;
    FailureOptions failure;
    /// Brute-force rows: time grid spacing.
    double brute_spacing = 0.1;
    /// Reported isolation coupling: the lambda holding p1 at this value.
    double p1_target = 0.01;
    /// Ceiling on estimate_cost(); 0 disables the check.
    double cost_ceiling = 0.0;

    void validate() const;
};

GroverInstance sweep_instance(const SweepSpec& spec, int n);

struct SweepRow {
    int n = 0;
    double N = 0.0;
    ScheduleKind schedule = ScheduleKind::Uniform;
    std::string preset;
    Method method = Method::FrequencyDomain;
    double T = 0.0;
    double gap_min = 0.0;
    std::optional<double> p1, err;
    /// Sum of the effective channel weights; p1 / (lambda^2 weight) is what the fits use.
    double weight = 0.0;
    std::optional<double> seconds;
    std::string failure;
    std::vector<std::string> warnings;
};

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    /// Root-mean-square residual of ln y.
    double rms = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of ln y against ln x. At least four points, all positive.
ExponentFit fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys);

struct LinearFit {
    Eigen::VectorXd coef, stderr_;
    double rss = 0.0;
    double r2 = 0.0;
};
/// Ordinary least squares y ~ X (X carries its own intercept column).
LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

enum class Scalability { Scalable, Marginal, NonScalable };
std::string_view to_string(Scalability s);

struct PolyRefit {
    /// ln(p1/lambda^2) = a + b ln N + beta ln n
    double b = 0.0, beta = 0.0;
    /// rss without the ln n regressor divided by rss with it.
    double improvement = 1.0;
};

struct GroupFit {
    ScheduleKind schedule;
    std::string preset;
    Method method;
    /// Fit of p1 / (lambda^2 weight) against N.
    ExponentFit fit;
    PolyRefit poly;
    Scalability scalability;
    /// lambda * sqrt(p1_target / p1) at the largest n.
    double lambda_for_target = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<GroupFit> fits;
    /// Groups with fewer than four usable rows.
    std::vector<std::string> skipped;
};

/// Rough node count of the whole sweep, used against cost_ceiling.
double estimate_cost(const SweepSpec& spec);

SweepResult run_sweep(const SweepSpec& spec);

/// Exponent < -0.1 scalable, > 0.1 non-scalable, otherwise marginal.
Scalability classify(double exponent);
/// Fits for every (schedule, preset, method) group with at least four rows.
std::vector<GroupFit> threshold_report(const std::vector<SweepRow>& rows, double lambda, double p1_target);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Reads rows written by write_csv (failure text and weight are not stored).
std::vector<SweepRow> read_csv(std::istream& is);
/// One gnuplot block per group: N, n, p1, err.
void write_dat(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::json to_json(const GroupFit& f);
nlohmann::json summary_json(const SweepSpec& spec, const SweepResult& result);

/// Formats with 17 significant digits.
std::string format_double(double x);

}  // namespace advs
