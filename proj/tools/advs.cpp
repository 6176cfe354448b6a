// advs: command-line front end for the adiabatic Grover decoherence engines.
#include <advs/config.hpp>
#include <advs/failure.hpp>
#include <advs/oracle.hpp>
#include <advs/sweep.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

using namespace advs;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kNumerical = 2;

struct Options {
    int n = 0;
    std::optional<double> s;
    std::size_t grid = 0;
    std::string config;
    std::string method;
    std::string n_list;
    unsigned jobs = 0;
    bool jobs_set = false;
    std::string out;
    std::string format;
    bool timing = false;
    std::string kind = "gap_squared";
    std::optional<double> epsilon, T, c;
    std::string marked;
    int qubit = 0;
    std::string channel = "x";
    std::optional<double> t;
    std::string csv_path;
};

GroverInstance instance_for(const Options& o) {
    if (!o.marked.empty()) {
        const auto inst = GroverInstance::from_bits(o.marked);
        if (o.n != 0 && inst.n_qubits() != o.n) throw ConfigError("--marked length differs from --n");
        return inst;
    }
    if (o.n < 1) throw ConfigError("--n is required");
    return GroverInstance::balanced(o.n);
}

Schedule schedule_for(const Options& o) {
    const auto inst = instance_for(o);
    const ScheduleKind kind = parse_schedule_kind(o.kind);
    const int given = o.epsilon.has_value() + o.T.has_value() + o.c.has_value();
    if (given > 1) throw ConfigError("give at most one of --epsilon, --T, --c");
    if (o.T) return Schedule::build(kind, inst, RuntimeTarget{*o.T});
    if (o.c) return Schedule::build(kind, inst, VelocityTarget{*o.c});
    return Schedule::build(kind, inst, ErrorTarget{o.epsilon.value_or(0.1)});
}

std::ostream* open_out(const Options& o, const std::string& default_name, std::unique_ptr<std::ofstream>& holder) {
    if (o.out.empty()) return &std::cout;
    std::filesystem::path p(o.out);
    if (std::filesystem::is_directory(p)) p /= default_name;
    holder = std::make_unique<std::ofstream>(p);
    if (!*holder) throw ConfigError("cannot write '" + p.string() + "'");
    return holder.get();
}

int cmd_gap(const Options& o) {
    const double N = instance_for(o).N();
    if (o.s && o.grid) throw ConfigError("give either --s or --grid");
    if (o.s) {
        const double g = gap(N, *o.s);
        if (o.format == "json")
            std::cout << json{{"s", *o.s}, {"gap", g}}.dump() << '\n';
        else
            std::cout << format_double(g) << '\n';
        return kOk;
    }
    if (o.grid < 2) throw ConfigError("gap needs --s or --grid M with M >= 2");
    json rows = json::array();
    if (o.format != "json") std::cout << "s,gap\n";
    for (std::size_t k = 0; k < o.grid; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(o.grid - 1);
        const double g = gap(N, s);
        if (o.format == "json")
            rows.push_back({{"s", s}, {"gap", g}});
        else
            std::cout << format_double(s) << ',' << format_double(g) << '\n';
    }
    if (o.format == "json") std::cout << rows.dump(2) << '\n';
    return kOk;
}

int cmd_schedule(const Options& o) {
    const Schedule sch = schedule_for(o);
    std::unique_ptr<std::ofstream> file;
    *open_out(o, "schedule.json", file) << to_json(sch, o.grid).dump(2) << '\n';
    return kOk;
}

int cmd_matrix_elements(const Options& o) {
    const Schedule sch = schedule_for(o);
    const PhaseIntegral phase(sch);
    const Channel ch = parse_channel(o.channel);
    std::vector<double> ts;
    if (o.t) {
        ts.push_back(*o.t);
    } else {
        const std::size_t M = o.grid ? o.grid : 11;
        if (M < 2) throw ConfigError("--grid must be >= 2");
        for (std::size_t k = 0; k < M; ++k) ts.push_back(sch.T() * static_cast<double>(k) / static_cast<double>(M - 1));
    }
    std::unique_ptr<std::ofstream> file;
    std::ostream& os = *open_out(o, "matrix_elements.csv", file);
    json rows = json::array();
    if (o.format != "json") os << "t,s,re,im,magnitude,coefficient,suppressed\n";
    for (double t : ts) {
        const MatrixElement m = matrix_element(phase, o.qubit, ch, t);
        const double s = sch.s_of_t(t);
        if (o.format == "json") {
            rows.push_back({{"t", t}, {"s", s}, {"re", m.value.real()}, {"im", m.value.imag()},
                            {"magnitude", m.magnitude}, {"coefficient", m.coefficient},
                            {"relative_sign", m.relative_sign}, {"suppressed", m.suppressed}});
        } else {
            os << format_double(t) << ',' << format_double(s) << ',' << format_double(m.value.real()) << ','
               << format_double(m.value.imag()) << ',' << format_double(m.magnitude) << ','
               << format_double(m.coefficient) << ',' << (m.suppressed ? 1 : 0) << '\n';
        }
    }
    if (o.format == "json") os << rows.dump(2) << '\n';
    return kOk;
}

RunConfig config_for(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    RunConfig rc = load_run_config(o.config);
    // flags override the config file
    if (!o.n_list.empty()) rc.sweep.n_list = parse_n_list(o.n_list);
    if (o.jobs_set) rc.sweep.jobs = o.jobs;
    if (!o.out.empty()) rc.out_dir = o.out;
    if (!o.format.empty()) rc.format = o.format;
    if (o.timing) rc.sweep.timing = true;
    if (rc.format != "csv" && rc.format != "json" && rc.format != "dat")
        throw ConfigError("--format must be csv, json or dat");
    return rc;
}

std::unique_ptr<EvalBudget> make_budget(RunConfig& rc) {
    const std::size_t limit = rc.budget ? rc.budget : EvalBudget::limit_from_env();
    auto b = std::make_unique<EvalBudget>(limit);
    rc.sweep.failure.budget = b.get();
    return b;
}

std::vector<Method> methods_for(const std::string& flag, const SpectralModel& model, const std::vector<Method>& fallback) {
    if (flag.empty()) return fallback;
    if (flag == "all") {
        std::vector<Method> m{Method::TimeDomain, Method::FrequencyDomain};
        if (model.kind == SpectrumKind::MarkovianDelta) m.push_back(Method::Markovian);
        m.push_back(Method::Asymptotic);
        return m;
    }
    return {parse_method(flag)};
}

int cmd_p1(const Options& o) {
    RunConfig rc = config_for(o);
    if (rc.sweep.n_list.empty()) throw ConfigError("config gives no qubit counts (key n)");
    auto budget = make_budget(rc);
    std::vector<SweepRow> rows;
    // one sweep per preset so that "all" can drop methods that do not apply
    for (const auto& model : rc.sweep.presets) {
        SweepSpec spec = rc.sweep;
        spec.presets = {model};
        spec.methods = methods_for(o.method, model, rc.sweep.methods);
        auto r = run_sweep(spec);
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    }

    bool failed = false;
    json report;
    report["lambda"] = rc.sweep.lambda;
    report["epsilon"] = rc.sweep.epsilon;
    json& cases = report["cases"] = json::array();
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        json c{{"n", rows[i].n}, {"N", rows[i].N}, {"schedule", to_string(rows[i].schedule)},
               {"preset", rows[i].preset}, {"T", rows[i].T}, {"gap_min", rows[i].gap_min}};
        json& est = c["estimates"] = json::array();
        std::vector<std::pair<std::string, double>> values;
        for (; j < rows.size() && rows[j].n == rows[i].n && rows[j].schedule == rows[i].schedule &&
               rows[j].preset == rows[i].preset;
             ++j) {
            const SweepRow& r = rows[j];
            json e{{"method", to_string(r.method)}};
            if (r.p1) {
                e["value"] = *r.p1;
                e["error"] = r.err.value_or(0.0);
                e["warnings"] = r.warnings;
                values.emplace_back(std::string(to_string(r.method)), *r.p1);
            } else {
                e["value"] = nullptr;
                e["failure"] = r.failure;
                failed = true;
            }
            est.push_back(e);
        }
        json& dev = c["relative_deviation"] = json::object();
        for (std::size_t a = 0; a < values.size(); ++a)
            for (std::size_t b = a + 1; b < values.size(); ++b) {
                const double x = values[a].second, y = values[b].second;
                const double scale = std::max(std::abs(x), std::abs(y));
                dev[values[a].first + "/" + values[b].first] = scale > 0.0 ? std::abs(x - y) / scale : 0.0;
            }
        cases.push_back(c);
        i = j;
    }
    json& fits = report["fits"] = json::array();
    for (const auto& f : threshold_report(rows, rc.sweep.lambda, rc.sweep.p1_target)) fits.push_back(to_json(f));

    if (o.out.empty() && o.format != "csv") {
        std::cout << report.dump(2) << '\n';
    } else if (o.out.empty()) {
        write_csv(std::cout, rows);
    } else {
        std::filesystem::create_directories(rc.out_dir);
        std::ofstream(std::filesystem::path(rc.out_dir) / "p1.json") << report.dump(2) << '\n';
        std::ofstream csv(std::filesystem::path(rc.out_dir) / "p1.csv");
        write_csv(csv, rows);
        std::cout << report.dump(2) << '\n';
    }
    for (const auto& r : rows)
        if (!r.failure.empty())
            std::cerr << "n=" << r.n << ' ' << to_string(r.schedule) << ' ' << r.preset << ' ' << to_string(r.method)
                      << ": " << r.failure << '\n';
    return failed ? kNumerical : kOk;
}

int cmd_sweep(const Options& o) {
    RunConfig rc = config_for(o);
    if (!o.method.empty() && o.method != "all") rc.sweep.methods = {parse_method(o.method)};
    if (rc.sweep.n_list.empty()) throw ConfigError("config gives no qubit counts (key n)");
    auto budget = make_budget(rc);
    const SweepResult res = run_sweep(rc.sweep);
    std::filesystem::create_directories(rc.out_dir);
    const std::filesystem::path base = std::filesystem::path(rc.out_dir) / rc.prefix;
    {
        std::ofstream csv(base.string() + ".csv");
        if (!csv) throw ConfigError("cannot write '" + base.string() + ".csv'");
        write_csv(csv, res.rows);
    }
    std::ofstream(base.string() + ".json") << summary_json(rc.sweep, res).dump(2) << '\n';
    if (rc.format == "dat") {
        std::ofstream dat(base.string() + ".dat");
        write_dat(dat, res.rows);
    }
    std::size_t failures = 0;
    for (const auto& r : res.rows) {
        if (r.failure.empty()) continue;
        ++failures;
        std::cerr << "n=" << r.n << ' ' << to_string(r.schedule) << ' ' << r.preset << ' ' << to_string(r.method)
                  << ": " << r.failure << '\n';
    }
    std::cout << "rows " << res.rows.size() << ", failed " << failures << ", written to " << base.string() << ".csv\n";
    for (const auto& f : res.fits)
        std::cout << to_string(f.schedule) << ' ' << f.preset << ' ' << to_string(f.method) << ": exponent "
                  << format_double(f.fit.exponent) << " +- " << format_double(f.fit.stderr_) << " -> "
                  << to_string(f.scalability) << '\n';
    return failures == res.rows.size() ? kNumerical : kOk;
}

int cmd_fit(const Options& o) {
    std::ifstream in(o.csv_path);
    if (!in) throw ConfigError("cannot open '" + o.csv_path + "'");
    const auto rows = read_csv(in);
    std::vector<std::string> keys;
    std::map<std::string, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        const std::string key = std::string(to_string(r.schedule)) + "," + r.preset + "," + std::string(to_string(r.method));
        if (!groups.count(key)) keys.push_back(key);
        auto& g = groups[key];
        if (r.p1 && *r.p1 > 0.0) g.push_back(&r);
    }
    json out = json::array();
    bool any = false;
    if (o.format != "json") std::cout << "schedule,preset,method,points,exponent,stderr,r2,exponent_per_qubit,classification\n";
    for (const auto& key : keys) {
        const auto& g = groups[key];
        if (g.size() < 4) {
            std::cerr << key << ": " << g.size() << " usable rows, need 4\n";
            continue;
        }
        std::vector<double> xs, ys, yq;
        for (const SweepRow* r : g) {
            xs.push_back(r->N);
            ys.push_back(*r->p1);
            yq.push_back(*r->p1 / r->n);
        }
        const ExponentFit f = fit_exponent(xs, ys);
        const ExponentFit fq = fit_exponent(xs, yq);
        any = true;
        const auto& r0 = *g.front();
        if (o.format == "json") {
            out.push_back({{"schedule", to_string(r0.schedule)}, {"preset", r0.preset}, {"method", to_string(r0.method)},
                           {"points", f.points}, {"exponent", f.exponent}, {"stderr", f.stderr_}, {"r2", f.r2},
                           {"exponent_per_qubit", fq.exponent}, {"classification", to_string(classify(fq.exponent))}});
        } else {
            std::cout << key << ',' << f.points << ',' << format_double(f.exponent) << ',' << format_double(f.stderr_)
                      << ',' << format_double(f.r2) << ',' << format_double(fq.exponent) << ','
                      << to_string(classify(fq.exponent)) << '\n';
        }
    }
    if (o.format == "json") std::cout << out.dump(2) << '\n';
    if (!any) {
        std::cerr << "no group has enough rows to fit\n";
        return kNumerical;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic Grover search under weak non-Markovian decoherence"};
    app.require_subcommand(1);
    Options o;

    auto* gap_cmd = app.add_subcommand("gap", "Spectral gap at s or on an s grid");
    gap_cmd->add_option("--n", o.n, "qubit count")->required();
    gap_cmd->add_option("--s", o.s, "interpolation parameter");
    gap_cmd->add_option("--grid", o.grid, "number of equally spaced s values in [0, 1]");
    gap_cmd->add_option("--format", o.format, "csv or json");

    auto add_schedule_opts = [&](CLI::App* c) {
        c->add_option("--n", o.n, "qubit count");
        c->add_option("--marked", o.marked, "marked bitstring (default 0101...)");
        c->add_option("--kind", o.kind, "uniform, gap_squared or gap_linear");
        c->add_option("--epsilon", o.epsilon, "adiabatic error target (default 0.1)");
        c->add_option("--T", o.T, "runtime");
        c->add_option("--c", o.c, "velocity scale");
        c->add_option("--out", o.out, "output file or directory");
        c->add_option("--format", o.format, "csv or json");
    };
    auto* sch_cmd = app.add_subcommand("schedule", "Schedule JSON");
    add_schedule_opts(sch_cmd);
    sch_cmd->add_option("--grid", o.grid, "maximum number of grid points written");

    auto* me_cmd = app.add_subcommand("matrix-elements", "Transition matrix elements along a schedule");
    add_schedule_opts(me_cmd);
    me_cmd->add_option("--qubit", o.qubit, "qubit index (0 = most significant)");
    me_cmd->add_option("--channel", o.channel, "x, y or z");
    me_cmd->add_option("--t", o.t, "single time");
    me_cmd->add_option("--grid", o.grid, "number of equally spaced times (default 11)");

    auto add_run_opts = [&](CLI::App* c) {
        c->add_option("--config", o.config, "JSON run configuration")->required();
        c->add_option("--method", o.method, "time, freq, markov, asymptotic, brute or all");
        c->add_option("--n", o.n_list, "qubit counts, e.g. 4,6,8 or 4..14");
        c->add_option_function<unsigned>("--jobs", [&](const unsigned& j) {
            o.jobs = j;
            o.jobs_set = true;
        }, "parallel rows (default: all cores)");
        c->add_option("--out", o.out, "output directory");
        c->add_option("--format", o.format, "csv, json or dat");
        c->add_flag("--timing", o.timing, "record per-row wall time");
    };
    auto* p1_cmd = app.add_subcommand("p1", "Failure probability by one or more methods");
    add_run_opts(p1_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep with exponent fits");
    add_run_opts(sweep_cmd);

    auto* fit_cmd = app.add_subcommand("fit", "Fit p1 ~ N^b per group of a sweep CSV");
    fit_cmd->add_option("csv", o.csv_path, "CSV written by sweep")->required();
    fit_cmd->add_option("--format", o.format, "csv or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*gap_cmd) return cmd_gap(o);
        if (*sch_cmd) return cmd_schedule(o);
        if (*me_cmd) return cmd_matrix_elements(o);
        if (*p1_cmd) return cmd_p1(o);
        if (*sweep_cmd) return cmd_sweep(o);
        if (*fit_cmd) return cmd_fit(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
