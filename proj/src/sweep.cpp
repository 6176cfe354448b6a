#include <advs/sweep.hpp>

#include <advs/oracle.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

namespace advs {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void SweepSpec::validate() const {
    if (n_list.empty()) throw ConfigError("sweep: n list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || n_list[i] > 52) throw ConfigError("sweep: qubit counts must lie in [1, 52]");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("sweep: n list must be strictly increasing");
    }
    if (schedules.empty()) throw ConfigError("sweep: no schedules given");
    for (ScheduleKind k : schedules)
        if (k == ScheduleKind::CustomTable) throw ConfigError("sweep: custom schedules cannot be swept over n");
    if (presets.empty()) throw ConfigError("sweep: no spectral presets given");
    for (const auto& m : presets) {
        try {
            m.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("sweep: invalid spectral model: ") + e.what());
        }
    }
    if (methods.empty()) throw ConfigError("sweep: no methods given");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("sweep: lambda must be finite and >= 0");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("sweep: epsilon must lie in (0, 0.5)");
    if (marked != "balanced" && marked != "zeros" && marked != "ones")
        throw ConfigError("sweep: marked must be balanced, zeros or ones");
    if (repetitions < 1) throw ConfigError("sweep: repetitions must be >= 1");
    if (!(brute_spacing > 0.0)) throw ConfigError("sweep: brute_spacing must be positive");
    if (!(p1_target > 0.0)) throw ConfigError("sweep: p1_target must be positive");
    if (!(failure.rel_tol > 0.0)) throw ConfigError("sweep: rel_tol must be positive");
    if (failure.panels_per_period < 1) throw ConfigError("sweep: panels_per_period must be >= 1");
}

GroverInstance sweep_instance(const SweepSpec& spec, int n) {
    if (spec.marked == "zeros") return GroverInstance(n, 0);
    if (spec.marked == "ones") return GroverInstance(n, (std::uint64_t{1} << n) - 1);
    return GroverInstance::balanced(n);
}

ExponentFit fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DomainError("fit_exponent: xs and ys differ in length");
    if (xs.size() < 4) throw DomainError("fit_exponent: at least four points are required");
    const std::size_t m = xs.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_exponent: values must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 1e-300)) throw DomainError("fit_exponent: all x values are equal");
    ExponentFit f;
    f.points = m;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - f.intercept - f.exponent * lx[i];
        rss += r * r;
    }
    f.stderr_ = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
    f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    f.rms = std::sqrt(rss / static_cast<double>(m));
    return f;
}

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index m = X.rows(), p = X.cols();
    if (y.size() != m) throw DomainError("fit_linear: dimension mismatch");
    if (m < p || p == 0) throw DomainError("fit_linear: fewer observations than regressors");
    const auto qr = X.colPivHouseholderQr();
    if (qr.rank() < p) throw DomainError("fit_linear: regressors are linearly dependent");
    LinearFit f;
    f.coef = qr.solve(y);
    const Eigen::VectorXd r = y - X * f.coef;
    f.rss = r.squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    f.r2 = tss > 0.0 ? 1.0 - f.rss / tss : 1.0;
    f.stderr_ = Eigen::VectorXd::Zero(p);
    if (m > p) {
        const double sigma2 = f.rss / static_cast<double>(m - p);
        const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
        f.stderr_ = cov.diagonal().cwiseSqrt();
    }
    return f;
}

std::string_view to_string(Scalability s) {
    switch (s) {
        case Scalability::Scalable: return "scalable";
        case Scalability::Marginal: return "marginal";
        case Scalability::NonScalable: return "non-scalable";
    }
    return "?";
}

Scalability classify(double exponent) {
    if (exponent < -0.1) return Scalability::Scalable;
    if (exponent > 0.1) return Scalability::NonScalable;
    return Scalability::Marginal;
}

double estimate_cost(const SweepSpec& spec) {
    double total = 0.0;
    for (int n : spec.n_list)
        for (ScheduleKind k : spec.schedules) {
            const double T = Schedule::build(k, sweep_instance(spec, n), ErrorTarget{spec.epsilon}).T();
            for (const auto& model : spec.presets) {
                const double B = model.kind == SpectrumKind::MarkovianDelta ? 0.0 : bandwidth(model);
                const double nodes = 15.0 * (B + 1.0) * T * spec.failure.panels_per_period / (2.0 * std::numbers::pi);
                for (Method m : spec.methods) {
                    switch (m) {
                        case Method::Markovian:
                        case Method::Asymptotic: total += 1e4; break;
                        case Method::BruteForce: total += std::pow(T / spec.brute_spacing, 2); break;
                        default: total += 2.0 * nodes * nodes; break;
                    }
                }
            }
        }
    return total * spec.repetitions;
}

namespace {

struct Task {
    int n;
    ScheduleKind schedule;
    std::size_t preset;
    Method method;
};

FailureEstimate evaluate(const SweepSpec& spec, const Task& task, const Schedule& sch, const CouplingConfig& cc) {
    const SpectralModel& model = spec.presets[task.preset];
    switch (task.method) {
        case Method::TimeDomain: return p1_time_domain(PhaseIntegral(sch), cc, model, spec.failure);
        case Method::FrequencyDomain: return p1_frequency_domain(PhaseIntegral(sch), cc, model, spec.failure);
        case Method::Markovian:
            if (model.kind != SpectrumKind::MarkovianDelta)
                throw DomainError("the markov method needs a Markovian (flat) spectrum");
            return p1_markovian(sch, cc, model.strength, model.channels, spec.failure);
        case Method::Asymptotic: return p1_asymptotic(sch, cc, model, spec.failure);
        case Method::BruteForce: {
            const auto kernel = oracle::analytic_kernel(model);
            const auto M = static_cast<std::size_t>(std::ceil(sch.T() / spec.brute_spacing)) + 1;
            return oracle::p1_brute_double_integral(sch, cc, kernel, M);
        }
    }
    throw DomainError("unknown method");
}

SweepRow run_row(const SweepSpec& spec, const Task& task) {
    SweepRow row;
    row.n = task.n;
    row.schedule = task.schedule;
    row.method = task.method;
    const SpectralModel& model = spec.presets[task.preset];
    row.preset = model.label.empty() ? std::string(to_string(model.kind)) : model.label;
    const GroverInstance inst = sweep_instance(spec, task.n);
    row.N = inst.N();
    row.gap_min = inst.min_gap();
    try {
        const Schedule sch = Schedule::build(task.schedule, inst, ErrorTarget{spec.epsilon});
        row.T = sch.T();
        CouplingConfig cc;
        cc.lambda = spec.lambda;
        cc.topology = spec.topology;
        cc.instance = inst;
        row.weight = effective_weight(cc, model).total;
        std::vector<double> times;
        FailureEstimate e;
        const int reps = spec.timing ? spec.repetitions : 1;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            e = evaluate(spec, task, sch, cc);
            times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        row.p1 = e.value;
        row.err = e.numerical_error;
        row.warnings = e.warnings;
        if (spec.timing) {
            std::sort(times.begin(), times.end());
            row.seconds = times[times.size() / 2];
        }
    } catch (const std::exception& ex) {
        row.p1.reset();
        row.err.reset();
        row.failure = ex.what();
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    if (spec.cost_ceiling > 0.0) {
        const double cost = estimate_cost(spec);
        if (cost > spec.cost_ceiling)
            throw ConfigError("sweep: estimated cost " + format_double(cost) + " exceeds the ceiling " +
                              format_double(spec.cost_ceiling));
    }
    std::vector<Task> tasks;
    for (int n : spec.n_list)
        for (ScheduleKind k : spec.schedules)
            for (std::size_t p = 0; p < spec.presets.size(); ++p)
                for (Method m : spec.methods) tasks.push_back({n, k, p, m});

    SweepResult result;
    result.rows.resize(tasks.size());
    unsigned jobs = spec.jobs != 0 ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
    // largest rows first so that stragglers do not dominate; results keep spec order
    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tasks[a].n > tasks[b].n; });
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < order.size();)
            result.rows[order[i]] = run_row(spec, tasks[order[i]]);
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.fits = threshold_report(result.rows, spec.lambda, spec.p1_target);
    for (ScheduleKind k : spec.schedules)
        for (const auto& model : spec.presets)
            for (Method m : spec.methods) {
                const std::string label = model.label.empty() ? std::string(to_string(model.kind)) : model.label;
                const bool fitted = std::any_of(result.fits.begin(), result.fits.end(), [&](const GroupFit& g) {
                    return g.schedule == k && g.preset == label && g.method == m;
                });
                if (!fitted)
                    result.skipped.push_back(std::string(to_string(k)) + "/" + label + "/" + std::string(to_string(m)));
            }
    return result;
}

std::vector<GroupFit> threshold_report(const std::vector<SweepRow>& rows, double lambda, double p1_target) {
    struct Key {
        ScheduleKind k;
        std::string preset;
        Method m;
    };
    std::vector<Key> keys;
    std::vector<std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        std::size_t g = 0;
        while (g < keys.size() && !(keys[g].k == r.schedule && keys[g].preset == r.preset && keys[g].m == r.method)) ++g;
        if (g == keys.size()) {
            keys.push_back({r.schedule, r.preset, r.method});
            groups.emplace_back();
        }
        if (r.p1 && *r.p1 > 0.0 && r.weight > 0.0) groups[g].push_back(&r);
    }
    std::vector<GroupFit> out;
    const double l2 = lambda * lambda;
    if (!(l2 > 0.0)) return out;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        const auto& rs = groups[g];
        if (rs.size() < 4) continue;
        std::vector<double> xs, ys;
        for (const SweepRow* r : rs) {
            xs.push_back(r->N);
            ys.push_back(*r->p1 / (l2 * r->weight));
        }
        GroupFit f{keys[g].k, keys[g].preset, keys[g].m, {}, {}, Scalability::Marginal, 0.0};
        try {
            f.fit = fit_exponent(xs, ys);
        } catch (const DomainError&) {
            continue;
        }
        f.scalability = classify(f.fit.exponent);
        const Eigen::Index m = static_cast<Eigen::Index>(rs.size());
        Eigen::MatrixXd X(m, 3);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            X(i, 0) = 1.0;
            X(i, 1) = std::log(rs[i]->N);
            X(i, 2) = std::log(static_cast<double>(rs[i]->n));
            y(i) = std::log(*rs[i]->p1 / l2);
        }
        try {
            const LinearFit with_n = fit_linear(X, y);
            const LinearFit base = fit_linear(X.leftCols(2), y);
            f.poly.b = with_n.coef(1);
            f.poly.beta = with_n.coef(2);
            f.poly.improvement = with_n.rss > 0.0 ? base.rss / with_n.rss : std::numeric_limits<double>::infinity();
        } catch (const DomainError&) {
        }
        f.lambda_for_target = lambda * std::sqrt(p1_target / *rs.back()->p1);
        out.push_back(f);
    }
    return out;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw ConfigError("csv: unterminated quote");
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, const char* column) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw ConfigError(std::string("csv: bad value in column ") + column + ": '" + s + "'");
    return v;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "n,N,schedule,preset,method,T,gap_min,p1,err,seconds\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.N) << ',' << to_string(r.schedule) << ',' << csv_field(r.preset) << ','
           << to_string(r.method) << ',' << format_double(r.T) << ',' << format_double(r.gap_min) << ','
           << (r.p1 ? format_double(*r.p1) : "") << ',' << (r.err ? format_double(*r.err) : "") << ','
           << (r.seconds ? format_double(*r.seconds) : "") << '\n';
    }
}

std::vector<SweepRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("csv: empty input");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"N", "p1"})
        if (!col.count(need)) throw ConfigError(std::string("csv: missing column ") + need);
    auto get = [&](const std::vector<std::string>& f, const char* name) -> std::string {
        const auto it = col.find(name);
        if (it == col.end() || it->second >= f.size()) return "";
        return f[it->second];
    };
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) throw ConfigError("csv: row has " + std::to_string(f.size()) + " fields, expected " +
                                                         std::to_string(header.size()));
        SweepRow r;
        r.N = parse_number(get(f, "N"), "N");
        const std::string n = get(f, "n");
        r.n = n.empty() ? static_cast<int>(std::lround(std::log2(r.N))) : static_cast<int>(parse_number(n, "n"));
        if (const auto s = get(f, "schedule"); !s.empty()) r.schedule = parse_schedule_kind(s);
        r.preset = get(f, "preset");
        if (const auto m = get(f, "method"); !m.empty()) r.method = parse_method(m);
        if (const auto s = get(f, "T"); !s.empty()) r.T = parse_number(s, "T");
        if (const auto s = get(f, "gap_min"); !s.empty()) r.gap_min = parse_number(s, "gap_min");
        if (const auto s = get(f, "p1"); !s.empty()) r.p1 = parse_number(s, "p1");
        if (const auto s = get(f, "err"); !s.empty()) r.err = parse_number(s, "err");
        if (const auto s = get(f, "seconds"); !s.empty()) r.seconds = parse_number(s, "seconds");
        r.weight = 1.0;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_dat(std::ostream& os, const std::vector<SweepRow>& rows) {
    std::vector<std::string> seen;
    bool first = true;
    for (const auto& head : rows) {
        const std::string key = std::string(to_string(head.schedule)) + " " + head.preset + " " +
                                std::string(to_string(head.method));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        if (!first) os << "\n\n";
        first = false;
        os << "# " << key << "\n# N n p1 err\n";
        for (const auto& r : rows) {
            if (r.schedule != head.schedule || r.preset != head.preset || r.method != head.method || !r.p1) continue;
            os << format_double(r.N) << ' ' << r.n << ' ' << format_double(*r.p1) << ' '
               << format_double(r.err.value_or(0.0)) << '\n';
        }
    }
}

nlohmann::json to_json(const GroupFit& f) {
    return {{"schedule", to_string(f.schedule)},
            {"preset", f.preset},
            {"method", to_string(f.method)},
            {"exponent", f.fit.exponent},
            {"stderr", f.fit.stderr_},
            {"r2", f.fit.r2},
            {"rms", f.fit.rms},
            {"points", f.fit.points},
            {"classification", to_string(f.scalability)},
            {"poly_n", {{"b", f.poly.b}, {"beta", f.poly.beta}, {"rss_improvement", f.poly.improvement}}},
            {"lambda_for_target", f.lambda_for_target}};
}

nlohmann::json summary_json(const SweepSpec& spec, const SweepResult& result) {
    nlohmann::json j;
    j["n"] = spec.n_list;
    auto& sch = j["schedules"] = nlohmann::json::array();
    for (auto k : spec.schedules) sch.push_back(to_string(k));
    auto& pre = j["presets"] = nlohmann::json::array();
    for (const auto& m : spec.presets) pre.push_back(m.label.empty() ? std::string(to_string(m.kind)) : m.label);
    auto& me = j["methods"] = nlohmann::json::array();
    for (auto m : spec.methods) me.push_back(to_string(m));
    j["lambda"] = spec.lambda;
    j["epsilon"] = spec.epsilon;
    j["topology"] = to_string(spec.topology);
    j["marked"] = spec.marked;
    j["p1_target"] = spec.p1_target;
    j["rows"] = result.rows.size();
    auto& fails = j["failures"] = nlohmann::json::array();
    for (const auto& r : result.rows)
        if (!r.failure.empty())
            fails.push_back({{"n", r.n},
                             {"schedule", to_string(r.schedule)},
                             {"preset", r.preset},
                             {"method", to_string(r.method)},
                             {"reason", r.failure}});
    auto& fits = j["fits"] = nlohmann::json::array();
    for (const auto& f : result.fits) fits.push_back(to_json(f));
    j["skipped_fits"] = result.skipped;
    return j;
}

}  // namespace advs
