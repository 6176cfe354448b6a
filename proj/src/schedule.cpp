#include <advs/schedule.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace advs {

ScheduleKind parse_schedule_kind(std::string_view name) {
    if (name == "uniform") return ScheduleKind::Uniform;
    if (name == "gap_squared") return ScheduleKind::GapSquared;
    if (name == "gap_linear") return ScheduleKind::GapLinear;
    if (name == "custom") return ScheduleKind::CustomTable;
    throw ConfigError("unknown schedule kind '" + std::string(name) +
                      "' (expected uniform, gap_squared, gap_linear or custom)");
}

std::string_view to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Uniform: return "uniform";
        case ScheduleKind::GapSquared: return "gap_squared";
        case ScheduleKind::GapLinear: return "gap_linear";
        case ScheduleKind::CustomTable: return "custom";
    }
    return "?";
}

int gap_power(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Uniform: return 0;
        case ScheduleKind::GapSquared: return 2;
        case ScheduleKind::GapLinear: return 1;
        case ScheduleKind::CustomTable: break;
    }
    throw DomainError("custom schedules have no gap power");
}

double error_per_velocity(const GroverInstance& instance, int p) {
    const double N = instance.N();
    auto F = [&](double s) { return adiabatic_coupling(instance, s) * std::pow(gap(N, s), p - 2); };
    // Sample on a grid clustered around the avoided crossing, then polish with golden section.
    const int M = 2000;
    const double stretch = std::asinh(std::sqrt(N));
    double best_s = 0.5, best = F(0.5);
    std::vector<double> grid(M + 1);
    for (int k = 0; k <= M; ++k) {
        const double u = -1.0 + 2.0 * k / M;
        grid[k] = std::clamp(0.5 + 0.5 * std::sinh(stretch * u) / std::sinh(stretch), 0.0, 1.0);
        const double v = F(grid[k]);
        if (v > best) {
            best = v;
            best_s = grid[k];
        }
    }
    const auto it = std::lower_bound(grid.begin(), grid.end(), best_s);
    const std::size_t k = static_cast<std::size_t>(it - grid.begin());
    double lo = grid[k == 0 ? 0 : k - 1], hi = grid[std::min<std::size_t>(k + 1, M)];
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = F(x1), f2 = F(x2);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = F(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = F(x1);
        }
    }
    return std::max({best, f1, f2});
}

struct Schedule::Data {
    ScheduleKind kind = ScheduleKind::Uniform;
    GroverInstance instance{1, 0};
    double T = 1.0;
    double c = 1.0;
    int p = 0;
    CumulativeTable table;        // int_0^s gap^-p for gap-adapted kinds
    std::vector<double> ct, cs;  // custom samples
};

namespace {

CumulativeTable inverse_velocity_table(const GroverInstance& instance, int p, const ScheduleOptions& opts) {
    const double N = instance.N();
    CumulativeTable::Options o;
    o.rel_tol = opts.rel_tol;
    o.max_nodes = opts.max_nodes;
    o.budget = opts.budget;
    const double gmin = 1.0 / std::sqrt(N);
    for (double d = 0.25 * gmin; d < 0.5; d *= 2.0) {
        o.seed_nodes.push_back(0.5 - d);
        o.seed_nodes.push_back(0.5 + d);
    }
    o.seed_nodes.push_back(0.5);
    return CumulativeTable::build([&](double s) { return std::pow(gap(N, s), -p); }, 0.0, 1.0, o);
}

double checked_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
    return v;
}

}  // namespace

Schedule Schedule::build(ScheduleKind kind, const GroverInstance& instance, ScheduleTarget target,
                         const ScheduleOptions& opts) {
    if (kind == ScheduleKind::CustomTable) throw DomainError("custom schedules are built from samples");
    auto d = std::make_shared<Data>();
    d->kind = kind;
    d->instance = instance;
    d->p = gap_power(kind);
    double integral = 1.0;  // int_0^1 gap^-p ds
    if (kind != ScheduleKind::Uniform) {
        d->table = inverse_velocity_table(instance, d->p, opts);
        integral = d->table.total();
    }
    if (const auto* rt = std::get_if<RuntimeTarget>(&target)) {
        d->T = checked_positive(rt->T, "runtime T");
        d->c = integral / d->T;
    } else if (const auto* et = std::get_if<ErrorTarget>(&target)) {
        d->c = checked_positive(et->epsilon, "adiabatic error target") / error_per_velocity(instance, d->p);
        d->T = integral / d->c;
    } else {
        d->c = checked_positive(std::get<VelocityTarget>(target).c, "velocity scale c");
        d->T = integral / d->c;
    }
    return Schedule(std::move(d));
}

Schedule Schedule::custom(const GroverInstance& instance, std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw DomainError("custom schedule needs at least two samples");
    if (samples.front().first != 0.0 || samples.front().second != 0.0)
        throw DomainError("custom schedule must start at (t, s) = (0, 0)");
    if (samples.back().second != 1.0) throw DomainError("custom schedule must end at s = 1");
    auto d = std::make_shared<Data>();
    d->kind = ScheduleKind::CustomTable;
    d->instance = instance;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && !(samples[i].first > samples[i - 1].first && samples[i].second > samples[i - 1].second))
            throw DomainError("custom schedule samples must be strictly increasing in t and s");
        d->ct.push_back(samples[i].first);
        d->cs.push_back(samples[i].second);
    }
    d->T = d->ct.back();
    d->c = 1.0 / d->T;
    return Schedule(std::move(d));
}

ScheduleKind Schedule::kind() const { return d_->kind; }
const GroverInstance& Schedule::instance() const { return d_->instance; }
double Schedule::T() const { return d_->T; }
double Schedule::c() const { return d_->c; }

double Schedule::s_of_t(double t) const {
    if (!(t >= 0.0 && t <= d_->T)) throw DomainError("s_of_t: t must lie in [0, T]");
    switch (d_->kind) {
        case ScheduleKind::Uniform: return t == d_->T ? 1.0 : t / d_->T;
        case ScheduleKind::CustomTable: {
            const auto& ct = d_->ct;
            const auto& cs = d_->cs;
            if (t >= ct.back()) return 1.0;
            const std::size_t i = static_cast<std::size_t>(std::upper_bound(ct.begin(), ct.end(), t) - ct.begin()) - 1;
            return cs[i] + (cs[i + 1] - cs[i]) * (t - ct[i]) / (ct[i + 1] - ct[i]);
        }
        default: return d_->table.inverse(t * d_->c);
    }
}

double Schedule::t_of_s(double s) const {
    require_unit_interval(s, "t_of_s");
    switch (d_->kind) {
        case ScheduleKind::Uniform: return s * d_->T;
        case ScheduleKind::CustomTable: {
            const auto& ct = d_->ct;
            const auto& cs = d_->cs;
            if (s >= 1.0) return d_->T;
            const std::size_t i = static_cast<std::size_t>(std::upper_bound(cs.begin(), cs.end(), s) - cs.begin()) - 1;
            return ct[i] + (ct[i + 1] - ct[i]) * (s - cs[i]) / (cs[i + 1] - cs[i]);
        }
        default: return s >= 1.0 ? d_->T : d_->table.value(s) / d_->c;
    }
}

double Schedule::s_dot(double s) const {
    require_unit_interval(s, "s_dot");
    switch (d_->kind) {
        case ScheduleKind::Uniform: return 1.0 / d_->T;
        case ScheduleKind::CustomTable: {
            const auto& ct = d_->ct;
            const auto& cs = d_->cs;
            std::size_t i = static_cast<std::size_t>(std::upper_bound(cs.begin(), cs.end(), s) - cs.begin());
            i = std::clamp<std::size_t>(i, 1, cs.size() - 1) - 1;
            return (cs[i + 1] - cs[i]) / (ct[i + 1] - ct[i]);
        }
        default: return d_->c * std::pow(gap(d_->instance.N(), s), d_->p);
    }
}

double Schedule::dt_ds(double s) const { return 1.0 / s_dot(s); }

std::vector<std::pair<double, double>> Schedule::grid() const {
    std::vector<std::pair<double, double>> g;
    switch (d_->kind) {
        case ScheduleKind::Uniform:
            for (int k = 0; k <= 100; ++k) {
                const double s = k / 100.0;
                g.emplace_back(s * d_->T, s);
            }
            break;
        case ScheduleKind::CustomTable:
            for (std::size_t i = 0; i < d_->ct.size(); ++i) g.emplace_back(d_->ct[i], d_->cs[i]);
            break;
        default: {
            const auto& x = d_->table.nodes();
            const auto& y = d_->table.values();
            for (std::size_t i = 0; i < x.size(); ++i) g.emplace_back(y[i] / d_->c, x[i]);
            g.back().first = d_->T;
        }
    }
    return g;
}

std::size_t Schedule::node_count() const {
    switch (d_->kind) {
        case ScheduleKind::Uniform: return 2;
        case ScheduleKind::CustomTable: return d_->ct.size();
        default: return d_->table.node_count();
    }
}

std::vector<double> Schedule::kinks() const {
    if (d_->kind != ScheduleKind::CustomTable) return {};
    return std::vector<double>(d_->cs.begin() + 1, d_->cs.end() - 1);
}

std::vector<std::pair<int, double>> runtime_scaling_sweep(ScheduleKind kind, const std::vector<int>& n_list,
                                                          double epsilon) {
    if (n_list.empty()) throw DomainError("runtime_scaling_sweep: empty qubit list");
    std::vector<std::pair<int, double>> rows;
    for (int n : n_list)
        rows.emplace_back(n, Schedule::build(kind, GroverInstance::balanced(n), ErrorTarget{epsilon}).T());
    return rows;
}

nlohmann::json to_json(const Schedule& schedule, std::size_t max_grid_points) {
    nlohmann::json doc;
    doc["kind"] = std::string(to_string(schedule.kind()));
    doc["n_qubits"] = schedule.instance().n_qubits();
    doc["marked"] = schedule.instance().marked_bits();
    doc["T"] = schedule.T();
    doc["c"] = schedule.c();
    auto g = schedule.grid();
    if (max_grid_points >= 2 && g.size() > max_grid_points) {
        std::vector<std::pair<double, double>> thin;
        for (std::size_t k = 0; k < max_grid_points; ++k) thin.push_back(g[k * (g.size() - 1) / (max_grid_points - 1)]);
        g = std::move(thin);
    }
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& [t, s] : g) grid.push_back({t, s});
    doc["grid"] = std::move(grid);
    return doc;
}

Schedule schedule_from_json(const nlohmann::json& doc) {
    try {
        const ScheduleKind kind = parse_schedule_kind(doc.at("kind").get<std::string>());
        const int n = doc.at("n_qubits").get<int>();
        const GroverInstance inst = doc.contains("marked") ? GroverInstance::from_bits(doc.at("marked").get<std::string>())
                                                           : GroverInstance::balanced(n);
        if (inst.n_qubits() != n) throw ConfigError("schedule JSON: marked bitstring length differs from n_qubits");
        if (kind == ScheduleKind::CustomTable) {
            std::vector<std::pair<double, double>> samples;
            for (const auto& row : doc.at("grid")) samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
            return Schedule::custom(inst, std::move(samples));
        }
        if (kind == ScheduleKind::Uniform) return Schedule::build(kind, inst, RuntimeTarget{doc.at("T").get<double>()});
        return Schedule::build(kind, inst, VelocityTarget{doc.at("c").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schedule JSON: ") + e.what());
    }
}

}  // namespace advs
