#include <advs/failure.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace advs {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::TimeDomain: return "time";
        case Method::FrequencyDomain: return "freq";
        case Method::Markovian: return "markov";
        case Method::Asymptotic: return "asymptotic";
        case Method::BruteForce: return "brute";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "time") return Method::TimeDomain;
    if (name == "freq") return Method::FrequencyDomain;
    if (name == "markov") return Method::Markovian;
    if (name == "asymptotic") return Method::Asymptotic;
    if (name == "brute") return Method::BruteForce;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected time, freq, markov or asymptotic)");
}

namespace {

void require_same_instance(const Schedule& schedule, const CouplingConfig& coupling) {
    if (!(schedule.instance() == coupling.instance))
        throw DomainError("coupling configuration and schedule refer to different problem instances");
    coupling.validate();
}

void set_breakdown(FailureEstimate& e, const EffectiveWeights& w, double lambda2, double base) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) e.breakdown[i][j] = lambda2 * w.combined[i][j] * base;
}

void finalize(FailureEstimate& e, const CouplingConfig& coupling) {
    if (coupling.lambda > CouplingConfig::weak_coupling_limit) {
        std::ostringstream os;
        os << "lambda = " << coupling.lambda << " exceeds the weak-coupling limit "
           << CouplingConfig::weak_coupling_limit;
        e.warnings.push_back(os.str());
    }
    if (e.value > 0.5) {
        e.unreliable = true;
        e.warnings.push_back("failure probability above 0.5: second-order perturbation theory is unreliable");
    }
}

/// Breakpoints that steer adaptive quadrature toward omega = 0 for singular power laws.
void add_origin_grading(const SpectralModel& model, double a, double b, std::vector<double>& cuts) {
    if (model.kind != SpectrumKind::PowerLaw || model.omega_min != 0.0) return;
    if (model.p >= 0.0 && model.p == std::floor(model.p)) return;
    for (double x = 0.5; x > 1e-18; x *= 0.5) {
        if (-x > a && -x < b) cuts.push_back(-x);
        if (x > a && x < b) cuts.push_back(x);
    }
}

double markovian_integral(const Schedule& schedule, const FailureOptions& opts, double* err) {
    const double N = schedule.instance().N();
    const double gmin = 1.0 / std::sqrt(N);
    QuadOptions q;
    q.rel_tol = std::min(opts.rel_tol, 1e-12);
    q.max_evaluations = opts.max_evaluations;
    q.budget = opts.budget;
    for (double d = gmin; d < 0.5; d *= 2.0) {
        q.breakpoints.push_back(0.5 - d);
        q.breakpoints.push_back(0.5 + d);
    }
    q.breakpoints.push_back(0.5);
    for (double k : schedule.kinks()) q.breakpoints.push_back(k);
    const QuadratureResult r = adaptive_quad(
        [&](double s) {
            const double g = (1.0 - s) / (std::sqrt(N) * gap(N, s));
            return g * g * schedule.dt_ds(s);
        },
        0.0, 1.0, q);
    if (!r.converged) throw BudgetExceeded("Markovian time integral did not converge within the evaluation budget");
    *err = r.abs_error_estimate;
    return r.value.real();
}

}  // namespace

FailureEstimate p1_markovian(const Schedule& schedule, const CouplingConfig& coupling, double A,
                             const ChannelWeights& channels, const FailureOptions& opts) {
    require_same_instance(schedule, coupling);
    if (!(A >= 0.0)) throw DomainError("Markovian strength A must be >= 0");
    FailureEstimate e;
    e.method = Method::Markovian;
    const EffectiveWeights w = effective_weight(coupling, channels);
    double err = 0.0;
    const double base = A * markovian_integral(schedule, opts, &err);
    const double l2 = coupling.lambda * coupling.lambda;
    e.value = l2 * w.total * base;
    e.numerical_error = std::abs(l2 * w.total * A) * err;
    set_breakdown(e, w, l2, base);
    finalize(e, coupling);
    return e;
}

FailureEstimate p1_time_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                               const CorrelationKernel& kernel, const FailureOptions& opts) {
    const Schedule& schedule = phase.schedule();
    require_same_instance(schedule, coupling);
    const EffectiveWeights w = effective_weight(coupling, kernel.channels());
    const double l2 = coupling.lambda * coupling.lambda;
    FailureEstimate e;
    e.method = Method::TimeDomain;
    if (kernel.is_delta()) {
        // C = A delta(t1 - t2) collapses the double integral onto the diagonal.
        AmplitudeEvaluator ev(phase, 1.0, {opts.panels_per_period, 50'000'000, opts.budget});
        static const auto wk = gk15::kronrod_weights();
        static const auto wg = gk15::gauss_weights();
        double sk = 0.0, sg = 0.0;
        for (std::size_t k = 0; k < ev.panel_count(); ++k)
            for (int i = 0; i < 15; ++i) {
                const double m2 = std::norm(ev.node_value(k, i));
                sk += wk[i] * m2;
                sg += wg[i] * m2;
            }
        const double h = 0.5 * ev.panel_length();
        const double base = kernel.delta_strength() * sk * h;
        e.value = l2 * w.total * base;
        e.numerical_error = std::abs(l2 * w.total * kernel.delta_strength() * (sk - sg) * h);
        e.evaluations = ev.node_count();
        set_breakdown(e, w, l2, base);
        finalize(e, coupling);
        return e;
    }
    if (kernel.tau_max() < schedule.T() * (1.0 - 1e-12))
        throw DomainError("correlation kernel covers |tau| <= " + std::to_string(kernel.tau_max()) +
                          " but the runtime is " + std::to_string(schedule.T()));

    static const auto x = gk15::nodes();
    static const auto wk = gk15::kronrod_weights();
    static const auto wg = gk15::gauss_weights();
    double base = 0.0, err = 0.0;
    for (int r = 0; r <= opts.max_refinements; ++r) {
        AmplitudeEvaluator ev(phase, kernel.bandwidth(),
                              {opts.panels_per_period << r, 50'000'000, opts.budget});
        const std::size_t K = ev.panel_count();
        const double L = ev.panel_length(), h = 0.5 * L;
        // u = weight * m with m = conj(exp(i Phi) g)
        std::vector<cplx> uk(15 * K), ug(15 * K);
        double l1 = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            for (int i = 0; i < 15; ++i) {
                const cplx m = std::conj(ev.node_value(k, i));
                uk[15 * k + i] = wk[i] * h * m;
                ug[15 * k + i] = wg[i] * h * m;
                l1 += std::abs(uk[15 * k + i]);
            }
        charge(opts.budget, 225 * K);
        std::vector<cplx> acc_k(K), acc_g(K);
        auto lag_block = [&](std::size_t d0, std::size_t d1) {
            cplx B[15][15];
            cplx S[15][15];
            for (std::size_t d = d0; d < d1; ++d) {
                for (int i = 0; i < 15; ++i)
                    for (int j = 0; j < 15; ++j) {
                        B[i][j] = kernel(static_cast<double>(d) * L + h * (x[i] - x[j]));
                        S[i][j] = 0.0;
                    }
                cplx sg = 0.0;
                for (std::size_t k = 0; k + d < K; ++k) {
                    const cplx* a = &uk[15 * (k + d)];
                    const cplx* b = &uk[15 * k];
                    for (int i = 0; i < 15; ++i) {
                        const cplx ai = a[i];
                        for (int j = 0; j < 15; ++j) S[i][j] += ai * std::conj(b[j]);
                    }
                    const cplx* ga = &ug[15 * (k + d)];
                    const cplx* gb = &ug[15 * k];
                    for (int i = 1; i < 15; i += 2)
                        for (int j = 1; j < 15; j += 2) sg += ga[i] * B[i][j] * std::conj(gb[j]);
                }
                cplx sk = 0.0;
                for (int i = 0; i < 15; ++i)
                    for (int j = 0; j < 15; ++j) sk += S[i][j] * B[i][j];
                acc_k[d] = sk;
                acc_g[d] = sg;
            }
        };
        const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(K)));
        if (threads == 1) {
            lag_block(0, K);
        } else {
            // interleave lags so that the triangular workload is balanced
            std::vector<std::thread> pool;
            const std::size_t chunk = 16;
            std::atomic<std::size_t> next{0};
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t d0; (d0 = next.fetch_add(chunk)) < K;) lag_block(d0, std::min(K, d0 + chunk));
                });
            for (auto& th : pool) th.join();
        }
        double pk = acc_k[0].real(), pg = acc_g[0].real();
        for (std::size_t d = 1; d < K; ++d) {
            pk += 2.0 * acc_k[d].real();
            pg += 2.0 * acc_g[d].real();
        }
        base = pk;
        err = std::abs(pk - pg) + kernel.error_estimate() * l1 * l1;
        e.evaluations += 225 * K * (K + 1) / 2;
        if (err <= opts.rel_tol * std::abs(pk)) break;
    }
    e.value = l2 * w.total * base;
    e.numerical_error = std::abs(l2 * w.total) * err;
    set_breakdown(e, w, l2, base);
    if (e.numerical_error > 1e-6 * std::abs(e.value) && e.value != 0.0)
        e.warnings.push_back("time-domain estimate did not reach the requested tolerance");
    finalize(e, coupling);
    return e;
}

FailureEstimate p1_time_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                               const SpectralModel& model, const FailureOptions& opts) {
    CorrelationKernel::Options ko;
    ko.spacing = opts.kernel_spacing;
    ko.threads = opts.threads;
    ko.budget = opts.budget;
    return p1_time_domain(phase, coupling, correlation_kernel(model, phase.schedule().T(), ko), opts);
}

FailureEstimate p1_frequency_domain(const PhaseIntegral& phase, const CouplingConfig& coupling,
                                    const SpectralModel& model, const FailureOptions& opts) {
    const Schedule& schedule = phase.schedule();
    require_same_instance(schedule, coupling);
    model.validate();
    if (model.kind == SpectrumKind::MarkovianDelta) {
        // flat spectrum: Parseval turns the unbounded omega integral into the time integral
        FailureEstimate e = p1_markovian(schedule, coupling, model.strength, model.channels, opts);
        e.method = Method::FrequencyDomain;
        return e;
    }
    if (infrared_divergent(model))
        throw InfraredDivergence("f(omega) |A(omega)|^2 is not integrable at omega = 0 for p <= -1; "
                                 "set an infrared cutoff omega_min > 0");
    const EffectiveWeights w = effective_weight(coupling, model);
    const double l2 = coupling.lambda * coupling.lambda;
    const double N = schedule.instance().N();
    const double gmin = 1.0 / std::sqrt(N);
    FailureEstimate e;
    e.method = Method::FrequencyDomain;

    const AmplitudeEvaluator ev(phase, bandwidth(model), {opts.panels_per_period, 50'000'000, opts.budget});
    const double T = schedule.T();
    const double width = 2.0 * std::numbers::pi / std::max(T, 1.0);
    double base = 0.0, err = 0.0;
    for (const auto& [a, b] : support(model)) {
        QuadOptions q;
        q.rel_tol = opts.rel_tol;
        q.max_evaluations = opts.max_evaluations;
        q.budget = opts.budget;
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
        for (int k = 1; k < m; ++k) q.breakpoints.push_back(a + (b - a) * k / m);
        for (double p : breakpoints(model)) q.breakpoints.push_back(p);
        for (double p : {-1.0, -3.0 * gmin, -2.0 * gmin, -gmin, 0.0, gmin})
            if (p > a && p < b) q.breakpoints.push_back(p);
        add_origin_grading(model, a, b, q.breakpoints);
        const QuadratureResult r = adaptive_quad(
            [&](double omega) -> cplx {
                const double f = spectral_density(model, omega);
                if (f == 0.0) return 0.0;
                const QuadratureResult amp = ev(omega);
                const double mag = std::abs(amp.value);
                // imaginary part carries the propagated amplitude error
                return {f * mag * mag, f * (2.0 * mag + amp.abs_error_estimate) * amp.abs_error_estimate};
            },
            a, b, q);
        e.evaluations += r.evaluations;
        if (!r.converged)
            throw BudgetExceeded("frequency integral did not converge within " + std::to_string(q.max_evaluations) +
                                 " evaluations");
        base += r.value.real();
        err += r.abs_error_estimate + std::abs(r.value.imag());
    }
    e.value = l2 * w.total * base;
    e.numerical_error = std::abs(l2 * w.total) * err;
    set_breakdown(e, w, l2, base);
    finalize(e, coupling);
    return e;
}

FailureEstimate p1_asymptotic(const Schedule& schedule, const CouplingConfig& coupling, const SpectralModel& model,
                              const FailureOptions& opts) {
    require_same_instance(schedule, coupling);
    model.validate();
    if (infrared_divergent(model))
        throw InfraredDivergence("the band integral of f around omega = 0 diverges for p <= -1 without a cutoff");
    const EffectiveWeights w = effective_weight(coupling, model);
    const double l2 = coupling.lambda * coupling.lambda;
    const double N = schedule.instance().N();
    const double gmin = 1.0 / std::sqrt(N);
    FailureEstimate e;
    e.method = Method::Asymptotic;

    QuadOptions q;
    q.rel_tol = std::max(opts.rel_tol, 1e-10);
    q.max_evaluations = opts.max_evaluations;
    q.budget = opts.budget;
    double band = 0.0, err = 0.0;
    if (model.kind == SpectrumKind::MarkovianDelta) {
        band = 2.0 * gmin * model.strength / (2.0 * std::numbers::pi);
    } else {
        QuadOptions qb = q;
        qb.breakpoints = breakpoints(model);
        qb.breakpoints.push_back(0.0);
        add_origin_grading(model, -gmin, gmin, qb.breakpoints);
        const QuadratureResult r = adaptive_quad([&](double o) { return spectral_density(model, o); }, -gmin, gmin, qb);
        if (!r.converged) throw BudgetExceeded("asymptotic band integral did not converge");
        band = r.value.real();
        err += r.abs_error_estimate * N;
        e.evaluations += r.evaluations;
    }
    QuadOptions qs = q;
    for (double p : {2.0 * gmin, 3.0 * gmin, 0.1, 0.5})
        if (p > gmin && p < 1.0) qs.breakpoints.push_back(p);
    for (double p : breakpoints(model))
        if (-p > gmin && -p < 1.0) qs.breakpoints.push_back(-p);
    const QuadratureResult r2 = adaptive_quad(
        [&](double o) {
            const double f = f_eval(model, -o).value;
            if (f == 0.0) return 0.0;
            const auto saddles = find_saddles(schedule, -o);
            if (saddles.empty()) return 0.0;
            double inv = 0.0;
            for (const auto& p : saddles) inv += schedule.dt_ds(p.s_star);
            inv /= static_cast<double>(saddles.size());
            return f * inv / (o * o);
        },
        gmin, 1.0, qs);
    if (!r2.converged) throw BudgetExceeded("asymptotic saddle integral did not converge");
    e.evaluations += r2.evaluations;
    const double pref2 = std::numbers::pi / (2.0 * N);
    e.term1 = l2 * w.total * N * band;
    e.term2 = l2 * w.total * pref2 * r2.value.real();
    e.value = e.term1 + e.term2;
    e.numerical_error = std::abs(l2 * w.total) * (err + pref2 * r2.abs_error_estimate);
    const double base = N * band + pref2 * r2.value.real();
    set_breakdown(e, w, l2, base);
    finalize(e, coupling);
    return e;
}

double p1_scaling_law(const GroverInstance& instance, const SpectralModel& model, const CouplingConfig& coupling) {
    if (!(instance == coupling.instance)) throw DomainError("coupling configuration refers to a different instance");
    const double gmin = instance.min_gap();
    const EffectiveWeights w = effective_weight(coupling, model);
    return coupling.lambda * coupling.lambda * w.total * f_eval(model, -gmin).value / gmin;
}

nlohmann::json to_json(const FailureEstimate& e) {
    nlohmann::json doc;
    doc["method"] = std::string(to_string(e.method));
    doc["value"] = e.value;
    doc["error"] = e.numerical_error;
    doc["breakdown"] = {{"xx", e.breakdown[0][0]}, {"xz", e.breakdown[0][1]}, {"zx", e.breakdown[1][0]},
                        {"zz", e.breakdown[1][1]}};
    if (e.method == Method::Asymptotic) {
        doc["term1"] = e.term1;
        doc["term2"] = e.term2;
    }
    doc["unreliable"] = e.unreliable;
    doc["warnings"] = e.warnings;
    return doc;
}

}  // namespace advs
