#include <advs/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace advs::oracle {

namespace {

using Mat = Eigen::Matrix2cd;
using Vec = Eigen::Vector2cd;

struct Subspace {
    double a, b;  // <w|psi0>, <w_perp|psi0>
    explicit Subspace(double N) : a(1.0 / std::sqrt(N)), b(std::sqrt(1.0 - 1.0 / N)) {}

    /// (1-s)|psi0><psi0| + s|w><w| on (w, w_perp).
    Eigen::Matrix2d projector_part(double s) const {
        Eigen::Matrix2d k;
        k << (1 - s) * a * a + s, (1 - s) * a * b, (1 - s) * a * b, (1 - s) * b * b;
        return k;
    }
    Eigen::Matrix2d hamiltonian(double s) const { return Eigen::Matrix2d::Identity() - projector_part(s); }
};

/// exp(-i M dt) for real symmetric M.
Mat expm_herm(const Eigen::Matrix2d& M, double dt) {
    const double tr = 0.5 * (M(0, 0) + M(1, 1));
    const double dz = 0.5 * (M(0, 0) - M(1, 1));
    const double r = std::hypot(dz, M(0, 1));
    const double c = std::cos(r * dt);
    const double sr = r > 0.0 ? std::sin(r * dt) / r : dt;
    Mat out;
    out(0, 0) = cplx(c, -sr * dz);
    out(1, 1) = cplx(c, sr * dz);
    out(0, 1) = out(1, 0) = cplx(0.0, -sr * M(0, 1));
    return std::polar(1.0, -tr * dt) * out;
}

double max_step_default() { return 2.0 * std::numbers::pi / 200.0; }

Mat sigma_matrix(double N, int eta, Channel channel, ElementMode mode) {
    const double e = 1.0 / std::sqrt(N - 1.0);
    const double b = std::sqrt(1.0 - 1.0 / N);
    Mat m = Mat::Zero();
    if (channel == Channel::Y) {
        m(0, 1) = cplx(0.0, -eta * e);
        m(1, 0) = cplx(0.0, eta * e);
        return m;
    }
    if (mode == ElementMode::Exact) {
        if (channel == Channel::X) {
            m(0, 1) = m(1, 0) = e;
            m(1, 1) = (N - 2.0) / (N - 1.0);
        } else {
            m(0, 0) = eta;
            m(1, 1) = -eta / (N - 1.0);
        }
    } else {
        if (channel == Channel::X)
            m(1, 1) = 1.0 / b;
        else
            m(0, 0) = eta / b;
    }
    return m;
}

std::vector<cplx> elements_for(const Schedule& schedule, int eta, Channel channel, const std::vector<double>& times,
                               ElementMode mode, double max_step) {
    const double N = schedule.instance().N();
    const Subspace sub(N);
    const Vec psi0(sub.a, sub.b);
    const Vec e1(sub.b, -sub.a);
    const Mat sigma = sigma_matrix(N, eta, channel, mode);
    const auto path = propagator_path(schedule, times, max_step);
    std::vector<cplx> out;
    out.reserve(times.size());
    for (const Mat& U : path) {
        const Vec u0 = U * psi0;
        const Vec u1 = U * e1;
        out.push_back(u0.dot(sigma * u1));  // dot conjugates the left operand
    }
    return out;
}

}  // namespace

double FullState::norm() const {
    double s = 0.0;
    for (const cplx& z : amplitudes) s += std::norm(z);
    return std::sqrt(s);
}

std::size_t default_steps(const Schedule& schedule) {
    return std::max<std::size_t>(10'000, static_cast<std::size_t>(std::ceil(schedule.T() / max_step_default())));
}

FullState evolve_full(const Schedule& schedule, std::size_t steps) {
    const GroverInstance& inst = schedule.instance();
    if (inst.n_qubits() > 12) throw DomainError("evolve_full: limited to n <= 12 qubits");
    if (steps == 0) steps = default_steps(schedule);
    const std::size_t dim = inst.dimension();
    const double N = inst.N();
    const Subspace sub(N);
    const std::size_t w = inst.marked();
    const double inv_perp = 1.0 / std::sqrt(N - 1.0);

    FullState st;
    st.amplitudes.assign(dim, cplx(1.0 / std::sqrt(N), 0.0));
    const double T = schedule.T();
    const double dt = T / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double s = schedule.s_of_t(std::min(T, (static_cast<double>(k) + 0.5) * dt));
        // exp(-iH dt) = exp(-i dt) exp(+i dt K) with K supported on span{w, w_perp}
        const Mat rot = expm_herm(-sub.projector_part(s), dt);
        cplx total = 0.0;
        for (const cplx& z : st.amplitudes) total += z;
        const cplx cw = st.amplitudes[w];
        const cplx cp = (total - cw) * inv_perp;
        const Vec c(cw, cp);
        const Vec dc = rot * c - c;
        const cplx phase = std::polar(1.0, -dt);
        const cplx add_perp = dc(1) * inv_perp;
        for (std::size_t x = 0; x < dim; ++x) st.amplitudes[x] = phase * (st.amplitudes[x] + add_perp);
        st.amplitudes[w] = phase * (cw + dc(0));
    }
    st.t = T;
    const double drift = std::abs(st.norm() - 1.0);
    if (drift > 1e-6) throw NumericalError("evolve_full: norm drift " + std::to_string(drift) + " exceeds 1e-6");
    return st;
}

double subspace_leakage(const FullState& state, const GroverInstance& instance) {
    const std::size_t dim = instance.dimension();
    const std::size_t w = instance.marked();
    cplx total = 0.0;
    for (const cplx& z : state.amplitudes) total += z;
    const cplx mean_perp = (total - state.amplitudes[w]) / static_cast<double>(dim - 1);
    double r = 0.0;
    for (std::size_t x = 0; x < dim; ++x)
        if (x != w) r += std::norm(state.amplitudes[x] - mean_perp);
    return std::sqrt(r);
}

std::vector<Mat> propagator_path(const Schedule& schedule, const std::vector<double>& times, double max_step) {
    if (max_step <= 0.0) max_step = max_step_default();
    const Subspace sub(schedule.instance().N());
    std::vector<Mat> out;
    out.reserve(times.size());
    Mat U = Mat::Identity();
    double t = 0.0;
    for (double target : times) {
        if (!(target >= t && target <= schedule.T())) throw DomainError("propagator_path: times must ascend within [0, T]");
        const std::size_t m = static_cast<std::size_t>(std::ceil((target - t) / max_step));
        const double dt = m > 0 ? (target - t) / static_cast<double>(m) : 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double mid = std::min(schedule.T(), t + (static_cast<double>(k) + 0.5) * dt);
            U = expm_herm(sub.hamiltonian(schedule.s_of_t(mid)), dt) * U;
        }
        t = target;
        out.push_back(U);
    }
    return out;
}

Propagator2x2 propagator_2x2(const Schedule& schedule, double t, std::size_t steps) {
    if (!(t >= 0.0 && t <= schedule.T())) throw DomainError("propagator_2x2: t must lie in [0, T]");
    if (steps == 0) steps = default_steps(schedule);
    const double max_step = schedule.T() / static_cast<double>(steps);
    Propagator2x2 p;
    p.U = t > 0.0 ? propagator_path(schedule, {t}, max_step).front() : Mat::Identity();
    p.steps = t > 0.0 ? static_cast<std::size_t>(std::ceil(t / max_step)) : 0;
    p.unitarity_error = (p.U.adjoint() * p.U - Mat::Identity()).cwiseAbs().maxCoeff();
    return p;
}

std::vector<cplx> propagated_matrix_elements(const Schedule& schedule, int qubit, Channel channel,
                                             const std::vector<double>& times, ElementMode mode, double max_step) {
    const int eta = schedule.instance().marked_bit(qubit) == 0 ? 1 : -1;
    return elements_for(schedule, eta, channel, times, mode, max_step);
}

namespace {

/// int_0^W w^p cos(w tau) dw for p in {0, 1, 2}.
double cosine_moment(int p, double W, double tau) {
    if (W == 0.0) return 0.0;
    const double x = W * tau;
    if (std::abs(x) < 1.0) {
        double sum = 0.0, term = 1.0;  // term = (-1)^k x^{2k} / (2k)!
        for (int k = 0; k < 30; ++k) {
            sum += term / (p + 2 * k + 1);
            term *= -x * x / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        }
        return std::pow(W, p + 1) * sum;
    }
    const double sn = std::sin(x), cs = std::cos(x);
    switch (p) {
        case 0: return sn / tau;
        case 1: return W * sn / tau + (cs - 1.0) / (tau * tau);
        case 2: return W * W * sn / tau + 2.0 * W * cs / (tau * tau) - 2.0 * sn / (tau * tau * tau);
    }
    throw DomainError("cosine_moment: p must be 0, 1 or 2");
}

}  // namespace

BruteKernel analytic_kernel(const SpectralModel& model) {
    BruteKernel k;
    k.channels = model.channels;
    switch (model.kind) {
        case SpectrumKind::MarkovianDelta:
            k.delta = true;
            k.strength = model.strength;
            return k;
        case SpectrumKind::Box: {
            const double mid = 0.5 * (model.lo + model.hi), half = 0.5 * (model.hi - model.lo), H = model.C;
            k.C = [=](double tau) {
                const double sinc = std::abs(half * tau) < 1e-8 ? 2.0 * half : 2.0 * std::sin(half * tau) / tau;
                return H * std::polar(1.0, -mid * tau) * sinc;
            };
            return k;
        }
        case SpectrumKind::PowerLaw: {
            const int p = static_cast<int>(model.p);
            if (!std::isinf(model.theta) || static_cast<double>(p) != model.p || p < 0 || p > 2)
                break;
            const double C = model.C, lo = model.omega_min, hi = model.omega_max;
            k.C = [=](double tau) {
                return cplx(2.0 * C * (cosine_moment(p, hi, tau) - cosine_moment(p, lo, tau)), 0.0);
            };
            return k;
        }
        default: break;
    }
    throw DomainError("no closed-form correlation function for spectral model '" + model.label + "'");
}

FailureEstimate p1_brute_double_integral(const Schedule& schedule, const CouplingConfig& coupling,
                                         const BruteKernel& kernel, std::size_t grid_points, ElementMode mode) {
    const GroverInstance& inst = schedule.instance();
    if (!(inst == coupling.instance)) throw DomainError("coupling configuration refers to a different instance");
    if (grid_points < 2) throw DomainError("brute double integral needs at least two grid points");
    if (!kernel.delta && !kernel.C) throw DomainError("brute double integral: kernel has no correlation function");
    FailureEstimate e;
    e.method = Method::BruteForce;
    const double l2 = coupling.lambda * coupling.lambda;

    const std::size_t M = grid_points;
    const double T = schedule.T();
    const double h = T / static_cast<double>(M - 1);
    std::vector<double> times(M), w(M, h);
    for (std::size_t k = 0; k < M; ++k) times[k] = std::min(T, h * static_cast<double>(k));
    w.front() = w.back() = 0.5 * h;
    const double max_step = std::min(max_step_default(), h);

    const Channel chans[2] = {Channel::X, Channel::Z};
    const double cw[2][2] = {{kernel.channels.xx, kernel.channels.xz}, {kernel.channels.zx, kernel.channels.zz}};
    std::vector<cplx> m[2];
    for (int i = 0; i < 2; ++i)
        if (cw[i][0] != 0.0 || cw[i][1] != 0.0 || cw[0][i] != 0.0 || cw[1][i] != 0.0)
            m[i] = elements_for(schedule, 1, chans[i], times, mode, max_step);

    std::vector<cplx> lag;
    if (!kernel.delta) {
        lag.resize(M);
        for (std::size_t k = 0; k < M; ++k) lag[k] = kernel.C(h * static_cast<double>(k));
    }
    auto pair_integral = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        if (kernel.delta) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < M; ++j) s += w[j] * a[j] * std::conj(b[j]);
            return kernel.strength * s;
        }
        std::vector<double> ar(M), ai(M), br(M), bi(M), cr(M), ci(M);
        for (std::size_t j = 0; j < M; ++j) {
            ar[j] = w[j] * a[j].real();
            ai[j] = w[j] * a[j].imag();
            br[j] = w[j] * b[j].real();
            bi[j] = -w[j] * b[j].imag();
            cr[j] = lag[j].real();
            ci[j] = lag[j].imag();
        }
        // sum_j sum_l a_j C(t_j - t_l) conj(b_l), C(-tau) = conj C(tau)
        double sr = 0.0, si = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            double xr = 0.0, xi = 0.0;
            for (std::size_t l = 0; l <= j; ++l) {  // lag j - l >= 0
                const double kr = cr[j - l], ki = ci[j - l];
                xr += kr * br[l] - ki * bi[l];
                xi += kr * bi[l] + ki * br[l];
            }
            for (std::size_t l = j + 1; l < M; ++l) {  // negative lag: conjugate
                const double kr = cr[l - j], ki = -ci[l - j];
                xr += kr * br[l] - ki * bi[l];
                xi += kr * bi[l] + ki * br[l];
            }
            sr += ar[j] * xr - ai[j] * xi;
            si += ar[j] * xi + ai[j] * xr;
        }
        return cplx(sr, si);
    };

    const int n = inst.n_qubits();
    double total = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (cw[i][j] == 0.0) continue;
            // sum over the qubit pairs that share a bath, with the z sign of each qubit
            double pairs = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (coupling.topology == Topology::IndependentBaths && a != b) continue;
                    const double sa = i == 1 ? (inst.marked_bit(a) == 0 ? 1.0 : -1.0) : 1.0;
                    const double sb = j == 1 ? (inst.marked_bit(b) == 0 ? 1.0 : -1.0) : 1.0;
                    pairs += sa * sb;
                }
            if (pairs == 0.0) continue;
            const double v = l2 * cw[i][j] * pairs * pair_integral(m[i], m[j]).real();
            e.breakdown[i][j] = v;
            total += v;
        }
    e.value = total;
    e.evaluations = M * M;
    if (e.value > 0.5) e.unreliable = true;
    return e;
}

}  // namespace advs::oracle
