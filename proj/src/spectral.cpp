#include <advs/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace advs {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

bool is_nonnegative_integer(double p) { return p >= 0.0 && p == std::floor(p); }
}  // namespace

std::string_view to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::MarkovianDelta: return "markovian";
        case SpectrumKind::PowerLaw: return "power_law";
        case SpectrumKind::Box: return "box";
        case SpectrumKind::Tabulated: return "tabulated";
    }
    return "?";
}

SpectrumKind parse_spectrum_kind(std::string_view name) {
    if (name == "markovian") return SpectrumKind::MarkovianDelta;
    if (name == "power_law") return SpectrumKind::PowerLaw;
    if (name == "box") return SpectrumKind::Box;
    if (name == "tabulated") return SpectrumKind::Tabulated;
    throw ConfigError("unknown spectrum kind '" + std::string(name) + "'");
}

double ChannelWeights::get(Channel mu, Channel nu) const {
    if (mu == Channel::Y || nu == Channel::Y) return 0.0;
    if (mu == Channel::X) return nu == Channel::X ? xx : xz;
    return nu == Channel::X ? zx : zz;
}

SpectralModel SpectralModel::markovian(double A) {
    SpectralModel m;
    m.kind = SpectrumKind::MarkovianDelta;
    m.strength = A;
    m.label = "markovian";
    m.validate();
    return m;
}

SpectralModel SpectralModel::power_law(double p, double C, double omega_min, double omega_max, double theta) {
    SpectralModel m;
    m.kind = SpectrumKind::PowerLaw;
    m.p = p;
    m.C = C;
    m.omega_min = omega_min;
    m.omega_max = omega_max;
    m.theta = theta;
    std::ostringstream os;
    os << "power_law(" << p << ")";
    m.label = os.str();
    m.validate();
    return m;
}

SpectralModel SpectralModel::box(double lo, double hi, double height) {
    SpectralModel m;
    m.kind = SpectrumKind::Box;
    m.lo = lo;
    m.hi = hi;
    m.C = height;
    std::ostringstream os;
    os << "box(" << lo << "," << hi << ")";
    m.label = os.str();
    m.validate();
    return m;
}

SpectralModel SpectralModel::tabulated(std::vector<double> omega, std::vector<double> f) {
    SpectralModel m;
    m.kind = SpectrumKind::Tabulated;
    m.grid_omega = std::move(omega);
    m.grid_f = std::move(f);
    m.label = "tabulated";
    m.validate();
    return m;
}

void SpectralModel::validate() const {
    switch (kind) {
        case SpectrumKind::MarkovianDelta:
            if (!(strength >= 0.0) || !std::isfinite(strength)) throw ConfigError("markovian strength must be >= 0");
            break;
        case SpectrumKind::PowerLaw:
            if (!(C >= 0.0) || !std::isfinite(C)) throw ConfigError("power law prefactor C must be >= 0");
            if (!std::isfinite(p)) throw ConfigError("power law exponent must be finite");
            if (!(omega_min >= 0.0 && omega_max > omega_min) || !std::isfinite(omega_max))
                throw ConfigError("power law cutoffs need 0 <= omega_min < omega_max < inf");
            if (!(theta >= 0.0)) throw ConfigError("temperature must be >= 0");
            break;
        case SpectrumKind::Box:
            if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("box needs lo < hi");
            if (!(C >= 0.0)) throw ConfigError("box height must be >= 0");
            break;
        case SpectrumKind::Tabulated:
            if (grid_omega.size() < 2 || grid_omega.size() != grid_f.size())
                throw ConfigError("tabulated spectrum needs >= 2 (omega, f) samples");
            for (std::size_t i = 0; i < grid_omega.size(); ++i) {
                if (i > 0 && !(grid_omega[i] > grid_omega[i - 1]))
                    throw ConfigError("tabulated omega must be strictly increasing");
                if (!(grid_f[i] >= 0.0) || !std::isfinite(grid_f[i]))
                    throw ConfigError("tabulated f must be finite and >= 0");
            }
            break;
    }
}

double detailed_balance(double omega, double theta) {
    if (std::isinf(theta)) return 1.0;
    if (theta == 0.0) return omega > 0.0 ? 1.0 : 0.0;
    const double x = omega / theta;
    if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
    return x / -std::expm1(-x);
}

SpectralValue f_eval(const SpectralModel& model, double omega) {
    switch (model.kind) {
        case SpectrumKind::MarkovianDelta: return {model.strength / (2.0 * std::numbers::pi), true};
        case SpectrumKind::PowerLaw: {
            const double a = std::abs(omega);
            if (a < model.omega_min || a > model.omega_max) return {0.0, false};
            const double b = detailed_balance(omega, model.theta);
            if (b == 0.0) return {0.0, false};
            if (a == 0.0) {
                if (model.p > 0.0) return {0.0, false};
                if (model.p == 0.0) return {model.C * b, false};
                return {inf, false};
            }
            return {model.C * std::pow(a, model.p) * b, false};
        }
        case SpectrumKind::Box:
            return {(omega >= model.lo && omega <= model.hi) ? model.C : 0.0, false};
        case SpectrumKind::Tabulated: {
            const auto& x = model.grid_omega;
            const auto& y = model.grid_f;
            if (omega < x.front() || omega > x.back()) return {0.0, false};
            std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), omega) - x.begin());
            i = std::clamp<std::size_t>(i, 1, x.size() - 1) - 1;
            const double u = (omega - x[i]) / (x[i + 1] - x[i]);
            return {y[i] + u * (y[i + 1] - y[i]), false};
        }
    }
    return {0.0, false};
}

double spectral_density(const SpectralModel& model, double omega) {
    const SpectralValue v = f_eval(model, omega);
    if (v.flat) throw DomainError("the Markovian model has no band-limited spectral density");
    return v.value;
}

std::vector<std::pair<double, double>> support(const SpectralModel& model) {
    switch (model.kind) {
        case SpectrumKind::MarkovianDelta: return {{-inf, inf}};
        case SpectrumKind::PowerLaw: {
            std::vector<std::pair<double, double>> out;
            if (model.theta != 0.0) out.emplace_back(-model.omega_max, -model.omega_min);
            if (model.omega_min == 0.0 && !out.empty())
                out.back().second = model.omega_max;
            else
                out.emplace_back(model.omega_min, model.omega_max);
            return out;
        }
        case SpectrumKind::Box: return {{model.lo, model.hi}};
        case SpectrumKind::Tabulated: return {{model.grid_omega.front(), model.grid_omega.back()}};
    }
    return {};
}

std::vector<double> breakpoints(const SpectralModel& model) {
    std::vector<double> out;
    switch (model.kind) {
        case SpectrumKind::PowerLaw:
            if (model.omega_min == 0.0 && model.theta != 0.0) out.push_back(0.0);
            break;
        case SpectrumKind::Tabulated:
            out.assign(model.grid_omega.begin() + 1, model.grid_omega.end() - 1);
            break;
        default: break;
    }
    return out;
}

bool infrared_divergent(const SpectralModel& model) {
    return model.kind == SpectrumKind::PowerLaw && model.p <= -1.0 && model.omega_min == 0.0 && model.C > 0.0;
}

SpectralModel preset(std::string_view name, const PresetParams& params) {
    if (name == "markovian") return SpectralModel::markovian(params.A);
    double p;
    std::string label(name);
    if (name == "photon_thermal" || name == "phonon_thermal") {
        if (params.D < 1 || params.D > 3) throw ConfigError("preset dimension D must be 1, 2 or 3");
        p = name == "photon_thermal" ? params.D - 1 : params.D - 3;
        label += "(" + std::to_string(params.D) + ")";
    } else if (name == "ohmic") {
        p = 0.0;
    } else {
        throw ConfigError("unknown preset '" + std::string(name) +
                          "' (expected photon_thermal, phonon_thermal, ohmic or markovian)");
    }
    double theta = params.theta;
    if (params.zero_temperature) {
        p += 1.0;
        theta = 0.0;
        label += "[T=0]";
    }
    SpectralModel m = SpectralModel::power_law(p, params.C, params.omega_min, params.omega_max, theta);
    m.label = label;
    return m;
}

SpectralModel preset_from_label(std::string_view label, const PresetParams& base) {
    PresetParams params = base;
    std::string name(label);
    const auto open = label.find('(');
    if (open != std::string_view::npos) {
        if (label.back() != ')') throw ConfigError("malformed preset label '" + std::string(label) + "'");
        name = std::string(label.substr(0, open));
        std::string args(label.substr(open + 1, label.size() - open - 2));
        std::stringstream ss(args);
        std::string tok;
        bool first = true;
        while (std::getline(ss, tok, ',')) {
            tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
            if (tok == "T=0") {
                params.zero_temperature = true;
            } else if (first) {
                try {
                    std::size_t used = 0;
                    params.D = std::stoi(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw ConfigError("malformed preset argument '" + tok + "'");
                }
            } else {
                throw ConfigError("malformed preset argument '" + tok + "'");
            }
            first = false;
        }
    }
    return preset(name, params);
}

std::string_view to_string(Topology t) { return t == Topology::CommonBath ? "common" : "independent"; }

Topology parse_topology(std::string_view name) {
    if (name == "common") return Topology::CommonBath;
    if (name == "independent") return Topology::IndependentBaths;
    throw ConfigError("unknown topology '" + std::string(name) + "' (expected common or independent)");
}

void CouplingConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("coupling lambda must be >= 0");
}

EffectiveWeights effective_weight(const CouplingConfig& config, const SpectralModel& model) {
    return effective_weight(config, model.channels);
}

double bandwidth(const SpectralModel& model) {
    double w = 0.0;
    for (const auto& [a, b] : support(model)) w = std::max({w, std::abs(a), std::abs(b)});
    return w;
}

EffectiveWeights effective_weight(const CouplingConfig& config, const ChannelWeights& channels) {
    const GroverInstance& inst = config.instance;
    const int n = inst.n_qubits();
    const Channel ch[2] = {Channel::X, Channel::Z};
    EffectiveWeights w{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double v = 0.0;
            if (config.topology == Topology::CommonBath) {
                double si = 0.0, sj = 0.0;
                for (int a = 0; a < n; ++a) {
                    si += channel_coefficient(inst, a, ch[i]);
                    sj += channel_coefficient(inst, a, ch[j]);
                }
                v = si * sj;
            } else {
                for (int a = 0; a < n; ++a) v += channel_coefficient(inst, a, ch[i]) * channel_coefficient(inst, a, ch[j]);
            }
            w.topology[i][j] = v;
            w.combined[i][j] = v * channels.get(ch[i], ch[j]);
        }
    }
    w.total = w.combined[0][0] + w.combined[0][1] + w.combined[1][0] + w.combined[1][1];
    return w;
}

OmegaRule omega_rule(const SpectralModel& model, double tau_max) {
    if (model.kind == SpectrumKind::MarkovianDelta) throw DomainError("omega_rule: flat spectrum");
    if (infrared_divergent(model))
        throw InfraredDivergence("spectral density |omega|^p with p <= -1 is not integrable at omega = 0; "
                                 "set an infrared cutoff omega_min > 0");
    const double max_width = std::numbers::pi / std::max(tau_max, 1.0);
    std::vector<double> edges;
    for (const auto& [a, b] : support(model)) {
        std::vector<double> cuts{a, b};
        for (double x : breakpoints(model))
            if (x > a && x < b) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double lo = cuts[i], hi = cuts[i + 1];
            const int m = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
            for (int k = 0; k < m; ++k) edges.push_back(lo + (hi - lo) * k / m);
            edges.push_back(hi);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Power laws that are not polynomials are singular at omega = 0: grade the adjacent panels geometrically.
    const bool graded = model.kind == SpectrumKind::PowerLaw && model.omega_min == 0.0 && !is_nonnegative_integer(model.p);
    std::vector<std::pair<double, double>> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        if (graded && (a == 0.0 || b == 0.0)) {
            const double far = a == 0.0 ? b : a;
            double x = far;
            for (int k = 0; k < 60; ++k) {
                const double next = 0.5 * x;
                panels.emplace_back(std::min(x, next), std::max(x, next));
                x = next;
            }
            panels.emplace_back(std::min(0.0, x), std::max(0.0, x));
        } else {
            panels.emplace_back(a, b);
        }
    }
    const auto xs = gk15::nodes();
    const auto wk = gk15::kronrod_weights();
    const auto wg = gk15::gauss_weights();
    OmegaRule rule;
    for (const auto& [a, b] : panels) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < 15; ++i) {
            const double w = c + h * xs[i];
            const double f = spectral_density(model, w);
            if (!std::isfinite(f)) throw InfraredDivergence("spectral density is not finite inside its support");
            rule.omega.push_back(w);
            rule.weight.push_back(h * wk[i] * f);
            rule.gauss_weight.push_back(h * wg[i] * f);
        }
    }
    return rule;
}

CorrelationKernel correlation_kernel(const SpectralModel& model, double tau_max,
                                     const CorrelationKernel::Options& opts) {
    model.validate();
    if (!(tau_max >= 0.0) || !std::isfinite(tau_max)) throw DomainError("correlation_kernel: tau_max must be >= 0");
    CorrelationKernel k;
    k.channels_ = model.channels;
    k.tau_max_ = tau_max;
    if (model.kind == SpectrumKind::MarkovianDelta) {
        k.delta_ = true;
        k.strength_ = model.strength;
        return k;
    }
    const OmegaRule rule = omega_rule(model, tau_max);
    const double wmax = bandwidth(model);
    k.bandwidth_ = wmax;
    const double h = opts.spacing > 0.0 ? opts.spacing : 0.2 / std::max(wmax, 1e-3);
    const std::size_t K = static_cast<std::size_t>(std::ceil(tau_max / h)) + 1;
    k.h_ = h;
    k.c_.assign(K + 1, cplx{});
    k.d1_.assign(K + 1, cplx{});
    k.d2_.assign(K + 1, cplx{});
    const std::size_t J = rule.omega.size();
    charge(opts.budget, J * (K + 1));

    // Each worker sweeps a block of tau values with the phase recurrence exp(-i w tau_{k+1}) = exp(-i w tau_k) exp(-i w h),
    // resetting from exact sincos every few dozen steps.
    auto work = [&](std::size_t k0, std::size_t k1) {
        std::vector<double> zr(J), zi(J), rr(J), ri(J), a0(J), a1(J), a2(J);
        for (std::size_t j = 0; j < J; ++j) {
            rr[j] = std::cos(rule.omega[j] * h);
            ri[j] = -std::sin(rule.omega[j] * h);
            a0[j] = rule.weight[j];
            a1[j] = rule.weight[j] * rule.omega[j];
            a2[j] = rule.weight[j] * rule.omega[j] * rule.omega[j];
        }
        for (std::size_t kk = k0; kk < k1; ++kk) {
            if ((kk - k0) % 32 == 0) {
                const double tau = static_cast<double>(kk) * h;
                for (std::size_t j = 0; j < J; ++j) {
                    zr[j] = std::cos(rule.omega[j] * tau);
                    zi[j] = -std::sin(rule.omega[j] * tau);
                }
            }
            double s0r = 0, s0i = 0, s1r = 0, s1i = 0, s2r = 0, s2i = 0;
            for (std::size_t j = 0; j < J; ++j) {
                s0r += a0[j] * zr[j];
                s0i += a0[j] * zi[j];
                s1r += a1[j] * zr[j];
                s1i += a1[j] * zi[j];
                s2r += a2[j] * zr[j];
                s2i += a2[j] * zi[j];
                const double nr = zr[j] * rr[j] - zi[j] * ri[j];
                zi[j] = zr[j] * ri[j] + zi[j] * rr[j];
                zr[j] = nr;
            }
            k.c_[kk] = {s0r, s0i};
            k.d1_[kk] = cplx(0.0, -1.0) * cplx(s1r, s1i);  // d/dtau brings down -i omega
            k.d2_[kk] = -cplx(s2r, s2i);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>((K + 1) / 64 + 1)));
    if (threads == 1) {
        work(0, K + 1);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (K + 1 + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t a = t * chunk, b = std::min(K + 1, a + chunk);
            if (a < b) pool.emplace_back(work, a, b);
        }
        for (auto& th : pool) th.join();
    }

    // Kronrod vs Gauss at a few lags.
    double err = 0.0, scale = 0.0;
    for (double tau : {0.0, 0.5 * tau_max, tau_max}) {
        cplx ck{}, cg{};
        for (std::size_t j = 0; j < J; ++j) {
            const cplx e = std::polar(1.0, -rule.omega[j] * tau);
            ck += rule.weight[j] * e;
            cg += rule.gauss_weight[j] * e;
        }
        err = std::max(err, std::abs(ck - cg));
        if (tau == 0.0) scale = std::abs(ck);
    }
    k.err_ = std::max(err, 1e-15 * scale);
    return k;
}

cplx CorrelationKernel::operator()(double tau) const {
    if (delta_) throw DomainError("delta-correlated kernel has no pointwise value");
    const double a = std::abs(tau);
    if (a > tau_max_ * (1.0 + 1e-12) + 1e-12) throw DomainError("correlation kernel evaluated beyond its tau range");
    std::size_t i = static_cast<std::size_t>(a / h_);
    if (i + 1 >= c_.size()) i = c_.size() - 2;
    const double u = a / h_ - static_cast<double>(i);
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    // quintic Hermite basis on [0, 1]
    const double h0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
    const double h1 = u - 6 * u3 + 8 * u4 - 3 * u5;
    const double h2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
    const double g0 = 10 * u3 - 15 * u4 + 6 * u5;
    const double g1 = -4 * u3 + 7 * u4 - 3 * u5;
    const double g2 = 0.5 * (u3 - 2 * u4 + u5);
    const cplx v = h0 * c_[i] + h1 * h_ * d1_[i] + h2 * h_ * h_ * d2_[i] + g0 * c_[i + 1] + g1 * h_ * d1_[i + 1] +
                   g2 * h_ * h_ * d2_[i + 1];
    return tau < 0.0 ? std::conj(v) : v;
}

nlohmann::json to_json(const SpectralModel& model) {
    nlohmann::json doc;
    doc["kind"] = std::string(to_string(model.kind));
    if (!model.label.empty()) doc["label"] = model.label;
    switch (model.kind) {
        case SpectrumKind::MarkovianDelta: doc["A"] = model.strength; break;
        case SpectrumKind::PowerLaw:
            doc["p"] = model.p;
            doc["C"] = model.C;
            doc["omega_min"] = model.omega_min;
            doc["omega_max"] = model.omega_max;
            doc["theta"] = std::isinf(model.theta) ? nlohmann::json("inf") : nlohmann::json(model.theta);
            break;
        case SpectrumKind::Box:
            doc["lo"] = model.lo;
            doc["hi"] = model.hi;
            doc["C"] = model.C;
            break;
        case SpectrumKind::Tabulated: {
            nlohmann::json g = nlohmann::json::array();
            for (std::size_t i = 0; i < model.grid_omega.size(); ++i) g.push_back({model.grid_omega[i], model.grid_f[i]});
            doc["grid"] = g;
            break;
        }
    }
    doc["channel_weights"] = {{"xx", model.channels.xx}, {"xz", model.channels.xz}, {"zx", model.channels.zx},
                              {"zz", model.channels.zz}};
    return doc;
}

namespace {

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> allowed, const char* where) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

double theta_from_json(const nlohmann::json& v) {
    if (v.is_null()) return inf;
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return inf;
        throw ConfigError("theta must be a number or \"inf\"");
    }
    return v.get<double>();
}

}  // namespace

SpectralModel spectral_model_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw ConfigError("spectral model must be a JSON object");
        reject_unknown(doc, {"kind", "label", "A", "p", "C", "omega_min", "omega_max", "theta", "lo", "hi", "grid",
                             "channel_weights"},
                       "spectral model");
        SpectralModel m;
        m.kind = parse_spectrum_kind(doc.at("kind").get<std::string>());
        m.label = doc.value("label", std::string(to_string(m.kind)));
        m.strength = doc.value("A", 1.0);
        m.p = doc.value("p", 0.0);
        m.C = doc.value("C", 1.0);
        m.omega_min = doc.value("omega_min", 0.0);
        m.omega_max = doc.value("omega_max", 1.0);
        if (doc.contains("theta")) m.theta = theta_from_json(doc.at("theta"));
        m.lo = doc.value("lo", 0.0);
        m.hi = doc.value("hi", 0.0);
        if (doc.contains("grid")) {
            for (const auto& row : doc.at("grid")) {
                m.grid_omega.push_back(row.at(0).get<double>());
                m.grid_f.push_back(row.at(1).get<double>());
            }
        }
        if (doc.contains("channel_weights")) {
            const auto& cw = doc.at("channel_weights");
            reject_unknown(cw, {"xx", "xz", "zx", "zz"}, "channel_weights");
            m.channels.xx = cw.value("xx", 1.0);
            m.channels.xz = cw.value("xz", 0.0);
            m.channels.zx = cw.value("zx", 0.0);
            m.channels.zz = cw.value("zz", 0.0);
        }
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spectral model: ") + e.what());
    }
}

SpectralModel load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum table '" + path + "'");
    std::vector<double> w, f;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw ConfigError("malformed row in spectrum table '" + path + "': " + line);
        }
        first = false;
        w.push_back(a);
        f.push_back(b);
    }
    SpectralModel m = SpectralModel::tabulated(std::move(w), std::move(f));
    m.label = "tabulated";
    return m;
}

}  // namespace advs
