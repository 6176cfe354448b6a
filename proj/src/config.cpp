#include <advs/config.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace advs {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

double number_or_inf(const json& v, const char* what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string(what) + " must be a number or \"inf\"");
}

std::vector<int> n_list_from(const json& v) {
    if (v.is_string()) return parse_n_list(v.get<std::string>());
    if (v.is_array()) return v.get<std::vector<int>>();
    if (v.is_object()) {
        reject_unknown(v, {"from", "to", "step"}, "n");
        const int from = v.at("from").get<int>(), to = v.at("to").get<int>();
        const int step = v.value("step", 1);
        if (step < 1 || to < from) throw ConfigError("n range needs from <= to and step >= 1");
        std::vector<int> out;
        for (int n = from; n <= to; n += step) out.push_back(n);
        return out;
    }
    throw ConfigError("n must be a list, a range object or a string such as \"4..14\"");
}

}  // namespace

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ConfigError("bad qubit count '" + s + "' in '" + text + "'");
        return v;
    };
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        std::string rest = text.substr(dots + 2);
        int step = 1;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            step = to_int(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const int from = to_int(text.substr(0, dots)), to = to_int(rest);
        if (step < 1 || to < from) throw ConfigError("bad qubit range '" + text + "'");
        for (int n = from; n <= to; n += step) out.push_back(n);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_int(tok));
    if (out.empty()) throw ConfigError("empty qubit list");
    return out;
}

RunConfig parse_run_config(const json& doc) {
    RunConfig rc;
    try {
        reject_unknown(doc,
                       {"n", "schedules", "presets", "preset_params", "lambda", "epsilon", "methods", "topology",
                        "marked", "repetitions", "jobs", "timing", "tolerances", "budget", "output", "p1_target", "seed"},
                       "config");
        SweepSpec& s = rc.sweep;
        if (doc.contains("seed")) {
            rc.seed = doc.at("seed").get<int>();
            if (rc.seed != 0) throw ConfigError("seed is reserved and must be 0");
        }
        if (doc.contains("preset_params")) {
            const json& pp = doc.at("preset_params");
            reject_unknown(pp, {"C", "theta", "omega_min", "omega_max", "A"}, "preset_params");
            rc.preset_params.C = pp.value("C", rc.preset_params.C);
            if (pp.contains("theta")) rc.preset_params.theta = number_or_inf(pp.at("theta"), "theta");
            rc.preset_params.omega_min = pp.value("omega_min", rc.preset_params.omega_min);
            rc.preset_params.omega_max = pp.value("omega_max", rc.preset_params.omega_max);
            rc.preset_params.A = pp.value("A", rc.preset_params.A);
        }
        if (doc.contains("n")) s.n_list = n_list_from(doc.at("n"));
        s.schedules.clear();
        for (const auto& k : doc.value("schedules", json::array({"gap_squared"})))
            s.schedules.push_back(parse_schedule_kind(k.get<std::string>()));
        s.presets.clear();
        for (const auto& p : doc.value("presets", json::array({"markovian"}))) {
            if (p.is_string())
                s.presets.push_back(preset_from_label(p.get<std::string>(), rc.preset_params));
            else
                s.presets.push_back(spectral_model_from_json(p));
        }
        s.lambda = doc.value("lambda", s.lambda);
        s.epsilon = doc.value("epsilon", s.epsilon);
        if (doc.contains("methods")) {
            s.methods.clear();
            for (const auto& m : doc.at("methods")) s.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (doc.contains("topology")) s.topology = parse_topology(doc.at("topology").get<std::string>());
        s.marked = doc.value("marked", s.marked);
        s.repetitions = doc.value("repetitions", s.repetitions);
        s.jobs = doc.value("jobs", s.jobs);
        s.timing = doc.value("timing", s.timing);
        s.p1_target = doc.value("p1_target", s.p1_target);
        if (doc.contains("tolerances")) {
            const json& t = doc.at("tolerances");
            reject_unknown(t, {"rel_tol", "panels_per_period", "max_refinements", "kernel_threads", "brute_spacing"},
                           "tolerances");
            s.failure.rel_tol = t.value("rel_tol", s.failure.rel_tol);
            s.failure.panels_per_period = t.value("panels_per_period", s.failure.panels_per_period);
            s.failure.max_refinements = t.value("max_refinements", s.failure.max_refinements);
            s.failure.threads = t.value("kernel_threads", s.failure.threads);
            s.brute_spacing = t.value("brute_spacing", s.brute_spacing);
        }
        if (doc.contains("budget")) {
            const json& b = doc.at("budget");
            reject_unknown(b, {"max_evaluations", "total_evaluations", "cost_ceiling"}, "budget");
            s.failure.max_evaluations = b.value("max_evaluations", s.failure.max_evaluations);
            rc.budget = b.value("total_evaluations", rc.budget);
            s.cost_ceiling = b.value("cost_ceiling", s.cost_ceiling);
        }
        if (doc.contains("output")) {
            const json& o = doc.at("output");
            reject_unknown(o, {"dir", "format", "prefix"}, "output");
            rc.out_dir = o.value("dir", rc.out_dir);
            rc.format = o.value("format", rc.format);
            rc.prefix = o.value("prefix", rc.prefix);
        }
        if (rc.format != "csv" && rc.format != "json" && rc.format != "dat")
            throw ConfigError("output format must be csv, json or dat");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(doc);
}

}  // namespace advs
