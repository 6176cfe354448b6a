#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace advs {

/// Search problem on n qubits: N = 2^n items, one marked state |w>.
/// Qubit a corresponds to character a of the bitstring (most significant first).
class GroverInstance {
public:
    GroverInstance(int n_qubits, std::uint64_t marked);
    /// Balanced default marked state 0101...
    static GroverInstance balanced(int n_qubits);
    static GroverInstance from_bits(std::string_view bits);

    int n_qubits() const { return n_; }
    std::uint64_t dimension() const { return std::uint64_t{1} << n_; }
    double N() const { return static_cast<double>(dimension()); }
    std::uint64_t marked() const { return marked_; }
    /// w_a, the a-th bit of the marked state.
    int marked_bit(int qubit) const;
    std::string marked_bits() const;
    double min_gap() const;

    bool operator==(const GroverInstance&) const = default;

private:
    int n_;
    std::uint64_t marked_;
};

/// Ground-to-first-excited gap sqrt(1 + 4 s (1-s)(1/N - 1)); minimum 1/sqrt(N) at s = 1/2.
double gap(double N, double s);
double gap(const GroverInstance& instance, double s);
/// d(gap)/ds.
double gap_slope(double N, double s);

/// Grover Hamiltonian restricted to span{|w>, |w_perp>}, ordered (w, w_perp).
struct EffectiveHamiltonian {
    double s;
    std::array<std::array<double, 2>, 2> h;
};

struct Eigensystem2 {
    double e0, e1;
    /// Components in the (w, w_perp) basis. The ground vector is non-negative;
    /// excited = (ground[1], -ground[0]) so it overlaps |w> positively at s = 0.
    std::array<double, 2> ground, excited;
    double splitting() const { return e1 - e0; }
};

EffectiveHamiltonian effective_hamiltonian(const GroverInstance& instance, double s);
Eigensystem2 diagonalize(const EffectiveHamiltonian& h);

/// |<E1|dH/ds|E0>| in the two-level model.
double adiabatic_coupling(const GroverInstance& instance, double s);

/// (1-s)/(sqrt(N) gap): modulus of the transition element at parameter s.
double transition_amplitude(const GroverInstance& instance, double s);

enum class Channel { X, Y, Z };
Channel parse_channel(std::string_view name);
std::string_view to_string(Channel c);

/// Real prefactor of the <w_perp|sigma_a^mu|w> element relative to exp(-i Phi)(1-s)/(sqrt(N) gap):
/// -1 for x, (-1)^{w_a} for z (the x value times the extra sign (-1)^{w_a+1}). Zero for y.
double channel_coefficient(const GroverInstance& instance, int qubit, Channel c);

void require_unit_interval(double s, const char* what);

}  // namespace advs
