#include <advs/grover.hpp>

#include <advs/errors.hpp>

#include <cmath>
#include <string>

namespace advs {

void require_unit_interval(double s, const char* what) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError(std::string(what) + ": s must lie in [0, 1], got " + std::to_string(s));
}

GroverInstance::GroverInstance(int n_qubits, std::uint64_t marked) : n_(n_qubits), marked_(marked) {
    if (n_qubits < 1 || n_qubits > 52) throw DomainError("GroverInstance: n_qubits must be in [1, 52]");
    if (marked >= dimension()) throw DomainError("GroverInstance: marked state out of range");
}

GroverInstance GroverInstance::balanced(int n_qubits) {
    std::string bits;
    for (int a = 0; a < n_qubits; ++a) bits.push_back(a % 2 == 0 ? '0' : '1');
    return from_bits(bits);
}

GroverInstance GroverInstance::from_bits(std::string_view bits) {
    if (bits.empty() || bits.size() > 52) throw DomainError("GroverInstance: bitstring length must be in [1, 52]");
    std::uint64_t value = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw DomainError("GroverInstance: bitstring must contain only 0 and 1");
        value = (value << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return GroverInstance(static_cast<int>(bits.size()), value);
}

int GroverInstance::marked_bit(int qubit) const {
    if (qubit < 0 || qubit >= n_) throw DomainError("qubit index out of range");
    return static_cast<int>((marked_ >> (n_ - 1 - qubit)) & 1u);
}

std::string GroverInstance::marked_bits() const {
    std::string bits;
    for (int a = 0; a < n_; ++a) bits.push_back(static_cast<char>('0' + marked_bit(a)));
    return bits;
}

double GroverInstance::min_gap() const { return gap(N(), 0.5); }

double gap(double N, double s) {
    if (!(N >= 2.0)) throw DomainError("gap: N must be at least 2");
    require_unit_interval(s, "gap");
    // (1-2s)^2 + 4 s (1-s)/N is the same polynomial, without cancellation near s = 1/2
    const double x = 1.0 - 2.0 * s;
    return std::sqrt(x * x + 4.0 * s * (1.0 - s) / N);
}

double gap(const GroverInstance& instance, double s) { return gap(instance.N(), s); }

double gap_slope(double N, double s) { return -2.0 * (1.0 - 2.0 * s) * (1.0 - 1.0 / N) / gap(N, s); }

EffectiveHamiltonian effective_hamiltonian(const GroverInstance& instance, double s) {
    require_unit_interval(s, "effective_hamiltonian");
    const double N = instance.N();
    const double a = 1.0 / std::sqrt(N);       // <w|psi0>
    const double b = std::sqrt(1.0 - 1.0 / N);  // <w_perp|psi0>
    // (1-s)(1 - |psi0><psi0|) + s(1 - |w><w|)
    EffectiveHamiltonian e{s, {}};
    e.h[0][0] = (1.0 - s) * b * b;
    e.h[0][1] = e.h[1][0] = -(1.0 - s) * a * b;
    e.h[1][1] = (1.0 - s) * a * a + s;
    return e;
}

Eigensystem2 diagonalize(const EffectiveHamiltonian& e) {
    const double p = e.h[0][0], q = e.h[0][1], r = e.h[1][1];
    const double mean = 0.5 * (p + r);
    const double half = 0.5 * std::hypot(p - r, 2.0 * q);
    Eigensystem2 out{mean - half, mean + half, {}, {}};
    double u, v;
    if (q == 0.0) {
        u = p <= r ? 1.0 : 0.0;
        v = 1.0 - u;
    } else {
        const double u1 = q, v1 = out.e0 - p;
        const double u2 = out.e0 - r, v2 = q;
        if (std::hypot(u1, v1) >= std::hypot(u2, v2)) {
            u = u1;
            v = v1;
        } else {
            u = u2;
            v = v2;
        }
        const double norm = std::hypot(u, v);
        u /= norm;
        v /= norm;
        if (u + v < 0.0) {
            u = -u;
            v = -v;
        }
    }
    out.ground = {u, v};
    out.excited = {v, -u};
    return out;
}

double adiabatic_coupling(const GroverInstance& instance, double s) {
    const double N = instance.N();
    const double a = 1.0 / std::sqrt(N);
    const double b = std::sqrt(1.0 - 1.0 / N);
    const Eigensystem2 es = diagonalize(effective_hamiltonian(instance, s));
    // dH/ds = |psi0><psi0| - |w><w|
    const double d00 = -b * b, d01 = a * b, d11 = b * b;
    const auto& g = es.ground;
    const auto& x = es.excited;
    return std::abs(x[0] * (d00 * g[0] + d01 * g[1]) + x[1] * (d01 * g[0] + d11 * g[1]));
}

double transition_amplitude(const GroverInstance& instance, double s) {
    return (1.0 - s) / (std::sqrt(instance.N()) * gap(instance, s));
}

Channel parse_channel(std::string_view name) {
    if (name == "x") return Channel::X;
    if (name == "y") return Channel::Y;
    if (name == "z") return Channel::Z;
    throw ConfigError("unknown channel '" + std::string(name) + "' (expected x, y or z)");
}

std::string_view to_string(Channel c) {
    switch (c) {
        case Channel::X: return "x";
        case Channel::Y: return "y";
        case Channel::Z: return "z";
    }
    return "?";
}

double channel_coefficient(const GroverInstance& instance, int qubit, Channel c) {
    switch (c) {
        case Channel::X: return -1.0;
        case Channel::Z: return instance.marked_bit(qubit) == 0 ? 1.0 : -1.0;
        case Channel::Y: return 0.0;
    }
    return 0.0;
}

}  // namespace advs
