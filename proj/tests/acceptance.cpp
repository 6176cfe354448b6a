// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <advs/failure.hpp>
#include <advs/oracle.hpp>
#include <advs/oscillatory.hpp>
#include <advs/sweep.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace advs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const ScheduleKind kAllSchedules[] = {ScheduleKind::Uniform, ScheduleKind::GapSquared, ScheduleKind::GapLinear};

CouplingConfig coupling_for(const GroverInstance& inst) {
    CouplingConfig c;
    c.lambda = 0.01;
    c.instance = inst;
    return c;
}

// Golden-section search on [0, 1]; knows nothing about where the minimum is.
std::pair<double, double> minimize_gap(double N) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    // bracket on a coarse grid first
    int best = 0;
    double fbest = gap(N, 0.0);
    for (int k = 1; k <= 1000; ++k) {
        const double f = gap(N, k / 1000.0);
        if (f < fbest) fbest = f, best = k;
    }
    double a = std::max(0, best - 1) / 1000.0, b = std::min(1000, best + 1) / 1000.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = gap(N, x1), f2 = gap(N, x2);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2, x2 = x1, f2 = f1;
            x1 = b - r * (b - a), f1 = gap(N, x1);
        } else {
            a = x1, x1 = x2, f1 = f2;
            x2 = a + r * (b - a), f2 = gap(N, x2);
        }
    }
    const double s = 0.5 * (a + b);
    return {s, std::min({gap(N, s), f1, f2})};
}

Outcome c1_gap_law() {
    double worst = 0.0, worst_s = 0.0;
    for (int n = 2; n <= 20; ++n) {
        const auto [s, g] = minimize_gap(std::ldexp(1.0, n));
        const double expect = std::pow(2.0, -0.5 * n);
        worst = std::max(worst, std::abs(g - expect) / expect);
        worst_s = std::max(worst_s, std::abs(s - 0.5));
    }
    return {worst < 1e-12 && worst_s < 1e-6,
            fmt("n=2..20: max rel err of min gap %.2e, max |s*-1/2| %.2e", worst, worst_s)};
}

Outcome c2_runtime_scaling() {
    std::vector<int> ns;
    for (int n = 4; n <= 16; ++n) ns.push_back(n);
    auto table = [&](ScheduleKind k) {
        std::vector<double> xs, ys;
        for (const auto& [n, T] : runtime_scaling_sweep(k, ns, 0.1)) {
            xs.push_back(std::ldexp(1.0, n));
            ys.push_back(T);
        }
        return std::pair{xs, ys};
    };
    const auto [xu, yu] = table(ScheduleKind::Uniform);
    const auto [xs, ys] = table(ScheduleKind::GapSquared);
    const auto [xl, yl] = table(ScheduleKind::GapLinear);
    const double bu = fit_exponent(xu, yu).exponent, bs = fit_exponent(xs, ys).exponent;
    // GapLinear: ln T = a + b ln N, then with ln(ln N) added for the logarithmic factor
    const Eigen::Index m = static_cast<Eigen::Index>(xl.size());
    Eigen::MatrixXd X1(m, 2), X2(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double lx = std::log(xl[i]);
        X1.row(i) << 1.0, lx;
        X2.row(i) << 1.0, lx, std::log(lx);
        y(i) = std::log(yl[i]);
    }
    const auto f1 = fit_linear(X1, y), f2 = fit_linear(X2, y);
    const double improvement = f1.rss / f2.rss, bl = f2.coef(1);
    const bool ok = std::abs(bu - 1.0) <= 0.05 && std::abs(bs - 0.5) <= 0.05 && std::abs(bl - 0.5) <= 0.05 &&
                    improvement >= 5.0;
    return {ok, fmt("uniform %.4f, gap_squared %.4f, gap_linear %.4f (power-only %.4f, rss improvement %.3g)", bu,
                    bs, bl, f1.coef(1), improvement)};
}

Outcome c3_markovian() {
    std::string detail;
    bool ok = true;
    for (auto kind : kAllSchedules) {
        std::vector<double> xs, ys;
        for (int n = 8; n <= 20; ++n) {
            const auto inst = GroverInstance::balanced(n);
            const auto sch = Schedule::build(kind, inst, ErrorTarget{0.1});
            const auto c = coupling_for(inst);
            // per unit channel weight (n independent baths)
            xs.push_back(inst.N());
            ys.push_back(p1_markovian(sch, c, 1.0).value / effective_weight(c, ChannelWeights{}).total);
        }
        const double b = fit_exponent(xs, ys).exponent;
        ok = ok && std::abs(b - 0.5) <= 0.05;
        detail += fmt("%s %.4f  ", std::string(to_string(kind)).c_str(), b);
    }
    return {ok, "n=8..20 exponents: " + detail};
}

Outcome c4_method_equivalence() {
    double worst_tf = 0.0, worst_bf = 0.0, worst_bt = 0.0;
    int configs = 0;
    for (int n : {4, 6, 8}) {
        for (auto kind : kAllSchedules) {
            const auto inst = GroverInstance::balanced(n);
            const auto sch = Schedule::build(kind, inst, ErrorTarget{0.03});
            const PhaseIntegral ph(sch);
            const auto c = coupling_for(inst);
            for (const auto& model : {SpectralModel::box(-1.5, 0.5), SpectralModel::power_law(2.0)}) {
                const double f = p1_frequency_domain(ph, c, model).value;
                const double t = p1_time_domain(ph, c, model).value;
                const auto M = static_cast<std::size_t>(std::ceil(sch.T() / 0.1)) + 1;
                const double b = oracle::p1_brute_double_integral(sch, c, oracle::analytic_kernel(model), M).value;
                worst_tf = std::max(worst_tf, std::abs(t - f) / f);
                worst_bf = std::max(worst_bf, std::abs(b - f) / f);
                worst_bt = std::max(worst_bt, std::abs(b - t) / t);
                ++configs;
            }
        }
    }
    return {configs >= 12 && worst_tf < 1e-3 && worst_bf < 1e-2 && worst_bt < 1e-2,
            fmt("%d configs at eps=0.03: time/freq %.2e, brute/freq %.2e, brute/time %.2e", configs, worst_tf,
                worst_bf, worst_bt)};
}

Outcome c5_matrix_elements() {
    bool ok = true;
    std::string detail;
    for (int n : {6, 8, 10}) {
        const auto inst = GroverInstance::balanced(n);
        const auto sch = Schedule::build(ScheduleKind::Uniform, inst, RuntimeTarget{20.0 * inst.N()});
        const PhaseIntegral ph(sch);
        std::vector<double> ts;
        for (int k = 0; k <= 120; ++k) ts.push_back(sch.t_of_s(0.2 + 0.6 * k / 120.0));
        double worst = 0.0;
        for (auto ch : {Channel::X, Channel::Z}) {
            for (int q = 0; q < n; ++q) {
                const auto pe =
                    oracle::propagated_matrix_elements(sch, q, ch, ts, oracle::ElementMode::LeadingOrder);
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    const cplx a = matrix_element(ph, q, ch, ts[i]).value;
                    worst = std::max(worst, std::abs(a - pe[i]) / std::abs(a));
                }
            }
        }
        const double bound = 5.0 / std::sqrt(inst.N());
        ok = ok && worst < bound;
        detail += fmt("n=%d %.3f (bound %.3f)  ", n, worst, bound);
    }
    return {ok, detail};
}

Outcome c6_positive_frequencies() {
    // p1 is linear in f, so the change from adding a box on (1, 2] is the box's own p1.
    // Uniform runs at n = 10 only because its runtime grows as N; its ratio is the smallest of the three.
    double worst = 0.0;
    std::string detail;
    const std::pair<ScheduleKind, int> cases[] = {
        {ScheduleKind::GapSquared, 14}, {ScheduleKind::GapLinear, 14}, {ScheduleKind::Uniform, 10}};
    for (const auto& [kind, n] : cases) {
        const auto inst = GroverInstance::balanced(n);
        const auto sch = Schedule::build(kind, inst, ErrorTarget{0.1});
        const PhaseIntegral ph(sch);
        const auto c = coupling_for(inst);
        const double added = p1_frequency_domain(ph, c, SpectralModel::box(1.0, 2.0)).value;
        double w = 0.0;
        for (int D : {1, 2, 3}) w = std::max(w, added / p1_frequency_domain(ph, c, preset("photon_thermal", {.D = D})).value);
        worst = std::max(worst, w);
        detail += fmt("%s n=%d %.2e  ", std::string(to_string(kind)).c_str(), n, w);
    }
    return {worst < 1e-4, "max relative change over photon_thermal(1..3): " + detail};
}

Outcome c7_stationary_phase() {
    double worst = 0.0;
    int points = 0;
    for (int n : {10, 12}) {
        const auto inst = GroverInstance::balanced(n);
        const auto sch = Schedule::build(ScheduleKind::Uniform, inst, ErrorTarget{0.1});
        const PhaseIntegral ph(sch);
        const AmplitudeEvaluator A(ph, 1.0);
        std::vector<double> ws{3.0 * inst.min_gap()};
        for (double w = 0.1; w <= 0.8 + 1e-12; w += 0.05)
            if (w > ws.front()) ws.push_back(w);
        for (double w : ws) {
            const auto sp = stationary_phase_amplitude_sq(sch, -w);
            // average |A|^2 over +-4 fringes of the two-saddle interference
            const double period = 2.0 * std::numbers::pi / (sp.saddles[1].t_star - sp.saddles[0].t_star);
            const int M = 161;
            double avg = 0.0;
            for (int k = 0; k < M; ++k) avg += std::norm(A(-w - 4.0 * period + 8.0 * period * k / (M - 1)).value);
            avg /= M;
            worst = std::max(worst, std::abs(sp.value / avg - 1.0));
            ++points;
        }
    }
    const auto inst = GroverInstance::balanced(20);
    const auto sch = Schedule::build(ScheduleKind::Uniform, inst, ErrorTarget{0.1});
    const double omega = -0.1;
    const double coef = std::numbers::pi / (2.0 * inst.N() * omega * omega * sch.s_dot(0.5));
    const double dev = std::abs(stationary_phase_amplitude_sq(sch, omega).value / coef - 1.0);
    return {worst < 0.2 && dev < 0.05,
            fmt("uniform n=10,12 (%d omegas): worst %.3f; N=2^20 coefficient deviation %.4f", points, worst, dev)};
}

SweepSpec acceptance_sweep() {
    SweepSpec spec;
    for (int n = 6; n <= 14; ++n) spec.n_list.push_back(n);
    spec.schedules = {ScheduleKind::GapSquared};
    spec.presets = {preset("photon_thermal", {.D = 1}), preset("photon_thermal", {.D = 2}),
                    preset("photon_thermal", {.D = 3})};
    spec.methods = {Method::FrequencyDomain, Method::Asymptotic};
    return spec;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    write_csv(os, r.rows);
    return os.str();
}

Outcome c8_infrared(const SweepResult& r) {
    std::string detail;
    bool ok = r.fits.size() == 6;
    for (const auto& g : r.fits) {
        if (g.method != Method::FrequencyDomain) continue;
        const double b = g.fit.exponent;
        if (g.preset == "photon_thermal(1)") ok = ok && b >= 0.4 && g.scalability == Scalability::NonScalable;
        if (g.preset == "photon_thermal(3)") ok = ok && b <= -0.4 && g.scalability == Scalability::Scalable;
        if (g.preset == "photon_thermal(2)")
            ok = ok && std::abs(b) <= 0.1 && g.scalability == Scalability::Marginal && g.poly.improvement > 1.0;
        detail += fmt("%s %+.3f %s", g.preset.c_str(), b, std::string(to_string(g.scalability)).c_str());
        if (g.preset == "photon_thermal(2)") detail += fmt(" (poly refit x%.3g)", g.poly.improvement);
        detail += "  ";
    }
    return {ok, detail};
}

Outcome c9_asymptotic(const SweepResult& r) {
    double lo = 1e300, hi = 0.0;
    int pairs = 0;
    for (const auto& a : r.rows) {
        if (a.method != Method::Asymptotic || !a.p1) continue;
        for (const auto& f : r.rows) {
            if (f.method == Method::FrequencyDomain && f.n == a.n && f.preset == a.preset && f.p1) {
                const double ratio = *a.p1 / *f.p1;
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
                ++pairs;
            }
        }
    }
    return {pairs == 27 && lo > 0.1 && hi < 10.0,
            fmt("%d rows: asymptotic/frequency ratio in [%.3f, %.3f]", pairs, lo, hi)};
}

Outcome c10_determinism(const std::string& first, const fs::path& out) {
    const std::string second = sweep_csv(run_sweep(acceptance_sweep()));
    std::ofstream(out / "acceptance_sweep_run2.csv", std::ios::binary) << second;
    return {first == second && !first.empty(),
            fmt("%zu bytes, runs %s", first.size(), first == second ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::create_directories(out);
    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("C%-2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), sec);
        std::fflush(stdout);
    };

    report(1, "gap law", c1_gap_law);
    report(2, "runtime scaling", c2_runtime_scaling);
    report(3, "Markovian blow-up", c3_markovian);
    report(4, "method equivalence", c4_method_equivalence);
    report(5, "matrix elements", c5_matrix_elements);
    report(6, "positive-frequency insensitivity", c6_positive_frequencies);
    report(7, "stationary phase", c7_stationary_phase);

    SweepResult sweep;
    std::string csv;
    report(8, "infrared criterion", [&] {
        sweep = run_sweep(acceptance_sweep());
        csv = sweep_csv(sweep);
        std::ofstream(out / "acceptance_sweep.csv", std::ios::binary) << csv;
        std::ofstream(out / "acceptance_sweep.json") << summary_json(acceptance_sweep(), sweep).dump(2) << "\n";
        return c8_infrared(sweep);
    });
    report(9, "asymptotic bracketing", [&] { return c9_asymptotic(sweep); });
    report(10, "determinism", [&] { return c10_determinism(csv, out); });

    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
