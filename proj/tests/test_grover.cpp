#include <advs/grover.hpp>
#include <advs/phase.hpp>
#include <advs/schedule.hpp>

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

using namespace advs;

namespace {

Eigen::Matrix2d as_matrix(const EffectiveHamiltonian& h) {
    Eigen::Matrix2d m;
    m << h.h[0][0], h.h[0][1], h.h[1][0], h.h[1][1];
    return m;
}

// Antiderivative of sqrt(alpha x^2 + beta) in x = 1 - 2s, used for the uniform-schedule phase.
double gap_antiderivative(double N, double x) {
    const double a = 1.0 - 1.0 / N, b = 1.0 / N;
    const double r = std::sqrt(a * x * x + b);
    return 0.5 * x * r + b / (2.0 * std::sqrt(a)) * std::asinh(x * std::sqrt(a / b));
}

double uniform_phase(double N, double T, double t) {
    // s = t/T, ds = -dx/2
    const double x = 1.0 - 2.0 * t / T;
    return 0.5 * T * (gap_antiderivative(N, 1.0) - gap_antiderivative(N, x));
}

}  // namespace

TEST_CASE("instance construction") {
    const auto g = GroverInstance::balanced(4);
    CHECK(g.marked_bits() == "0101");
    CHECK(g.N() == 16.0);
    CHECK(g.marked_bit(0) == 0);
    CHECK(g.marked_bit(1) == 1);
    CHECK(GroverInstance::from_bits("110").marked() == 6);
    CHECK_THROWS_AS(GroverInstance(3, 8), DomainError);
    CHECK_THROWS_AS(GroverInstance(0, 0), DomainError);
    CHECK_THROWS_AS(GroverInstance::from_bits("01x"), DomainError);
}

TEST_CASE("gap values") {
    CHECK(gap(4.0, 0.5) == 0.5);
    CHECK(gap(1024.0, 0.0) == 1.0);
    CHECK(gap(16.0, 0.25) == doctest::Approx(std::sqrt(0.296875)).epsilon(1e-15));
    CHECK(gap(16.0, 0.25) == doctest::Approx(0.544862367942584194).epsilon(1e-15));
    CHECK_THROWS_AS(gap(4.0, -0.1), DomainError);
    CHECK_THROWS_AS(gap(4.0, 1.1), DomainError);
    CHECK_THROWS_AS(gap(1.0, 0.5), DomainError);
}

TEST_CASE("gap symmetry and minimum") {
    for (int n = 1; n <= 20; ++n) {
        const double N = std::ldexp(1.0, n);
        CHECK(gap(N, 0.5) == doctest::Approx(1.0 / std::sqrt(N)).epsilon(1e-15));
        for (double s = 0.0; s <= 1.0; s += 0.0625) {
            CHECK(gap(N, s) == doctest::Approx(gap(N, 1.0 - s)).epsilon(1e-14));
            CHECK(gap(N, s) >= gap(N, 0.5));
        }
    }
}

TEST_CASE("gap slope matches finite differences") {
    for (double N : {4.0, 256.0}) {
        for (double s : {0.1, 0.3, 0.49, 0.7}) {
            const double h = 1e-6;
            const double fd = (gap(N, s + h) - gap(N, s - h)) / (2 * h);
            CHECK(gap_slope(N, s) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("effective Hamiltonian eigenvectors at the endpoints") {
    const auto e1 = diagonalize(effective_hamiltonian(GroverInstance::balanced(5), 1.0));
    CHECK(e1.ground[0] == doctest::Approx(1.0));
    CHECK(e1.ground[1] == doctest::Approx(0.0));
    const auto e0 = diagonalize(effective_hamiltonian(GroverInstance::balanced(2), 0.0));
    CHECK(e0.ground[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e0.ground[1] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("effective Hamiltonian splitting equals the gap (dense eigensolve)") {
    const auto h = effective_hamiltonian(GroverInstance::balanced(4), 0.5);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(as_matrix(h));
    CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) == doctest::Approx(0.25).epsilon(1e-14));
    for (int n : {1, 3, 8, 16}) {
        const auto inst = GroverInstance::balanced(n);
        for (double s = 0.0; s <= 1.0; s += 0.05) {
            const auto eh = effective_hamiltonian(inst, s);
            const auto d = diagonalize(eh);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ref(as_matrix(eh));
            CHECK(d.e0 == doctest::Approx(ref.eigenvalues()(0)).epsilon(1e-12).scale(1.0));
            CHECK(d.e1 == doctest::Approx(ref.eigenvalues()(1)).epsilon(1e-12).scale(1.0));
            CHECK(d.splitting() == doctest::Approx(gap(inst, s)).epsilon(1e-12));
            CHECK(eh.h[0][1] == eh.h[1][0]);
        }
    }
}

TEST_CASE("instantaneous eigenbasis carries no Berry connection") {
    const auto inst = GroverInstance::balanced(6);
    const double h = 1e-6;
    for (double s = 0.01; s < 1.0; s += 0.01) {
        const auto a = diagonalize(effective_hamiltonian(inst, s));
        const auto lo = diagonalize(effective_hamiltonian(inst, s - h));
        const auto hi = diagonalize(effective_hamiltonian(inst, s + h));
        // real normalized vectors: <E|dE/ds> vanishes identically
        double conn = 0.0;
        for (int i = 0; i < 2; ++i) {
            conn += a.ground[i] * (hi.ground[i] - lo.ground[i]) / (2 * h);
            conn += a.excited[i] * (hi.excited[i] - lo.excited[i]) / (2 * h);
        }
        CHECK(std::abs(conn) < 1e-8);
    }
}

TEST_CASE("adiabatic coupling equals ab/gap") {
    for (int n : {2, 6, 12}) {
        const auto inst = GroverInstance::balanced(n);
        const double N = inst.N(), a = 1.0 / std::sqrt(N), b = std::sqrt(1.0 - 1.0 / N);
        for (double s : {0.0, 0.2, 0.5, 0.9, 1.0})
            CHECK(adiabatic_coupling(inst, s) == doctest::Approx(a * b / gap(N, s)).epsilon(1e-12));
    }
}

TEST_CASE("channel coefficients") {
    const auto inst = GroverInstance::balanced(4);
    CHECK(channel_coefficient(inst, 0, Channel::X) == -1.0);
    CHECK(channel_coefficient(inst, 0, Channel::Z) == 1.0);
    CHECK(channel_coefficient(inst, 1, Channel::Z) == -1.0);
    CHECK(channel_coefficient(inst, 1, Channel::Y) == 0.0);
    CHECK(parse_channel("z") == Channel::Z);
    CHECK_THROWS_AS(parse_channel("w"), ConfigError);
}

TEST_CASE("phase integral of the uniform schedule") {
    const auto sch = Schedule::build(ScheduleKind::Uniform, GroverInstance::balanced(2), RuntimeTarget{10.0});
    const PhaseIntegral ph(sch);
    CHECK(ph.at_time(0.0) == 0.0);
    CHECK(ph.total() == doctest::Approx(6.9008649907523659).epsilon(1e-12));
    CHECK(ph.total() == doctest::Approx(uniform_phase(4.0, 10.0, 10.0)).epsilon(1e-12));
    for (double t : {1.0, 3.3, 5.0, 9.0})
        CHECK(ph.at_time(t) == doctest::Approx(uniform_phase(4.0, 10.0, t)).epsilon(1e-11));
}

TEST_CASE("phase integral bounds, monotonicity and derivative") {
    for (auto kind : {ScheduleKind::Uniform, ScheduleKind::GapSquared, ScheduleKind::GapLinear}) {
        const auto sch = Schedule::build(kind, GroverInstance::balanced(8), ErrorTarget{0.1});
        const PhaseIntegral ph(sch);
        const double T = sch.T();
        CHECK(ph.total() >= T * gap(256.0, 0.5));
        double prev = -1.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = T * k / 200.0;
            const double v = ph.at_time(t);
            CHECK(v > prev);
            prev = v;
        }
        const double dt = T * 1e-6;
        for (double f : {0.1, 0.4, 0.5, 0.77}) {
            const double t = f * T;
            const double d = (ph.at_time(t + dt) - ph.at_time(t - dt)) / (2 * dt);
            CHECK(std::abs(d - gap(256.0, sch.s_of_t(t))) < 1e-6);
        }
        CHECK_THROWS_AS(ph.at_time(-1.0), DomainError);
        CHECK_THROWS_AS(ph.at_time(T * 1.01), DomainError);
    }
}

TEST_CASE("matrix elements") {
    SUBCASE("vanishes at the end of the schedule") {
        const auto sch = Schedule::build(ScheduleKind::GapSquared, GroverInstance::balanced(6), ErrorTarget{0.1});
        const PhaseIntegral ph(sch);
        CHECK(std::abs(matrix_element(ph, 0, Channel::X, sch.T()).value) < 1e-15);
    }
    SUBCASE("magnitude one half at the gap minimum") {
        const auto sch = Schedule::build(ScheduleKind::Uniform, GroverInstance::balanced(8), RuntimeTarget{2.0});
        const PhaseIntegral ph(sch);
        const auto m = matrix_element(ph, 0, Channel::X, 1.0);
        CHECK(m.magnitude == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(m.value) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(m.coefficient == -1.0);
        const cplx expected = -std::polar(1.0, -ph.at_time(1.0)) * 0.5;
        CHECK(std::abs(m.value - expected) < 1e-14);
    }
    SUBCASE("z channel on a zero bit") {
        const auto inst = GroverInstance::balanced(4);
        REQUIRE(inst.marked_bit(0) == 0);
        const auto sch = Schedule::build(ScheduleKind::Uniform, inst, RuntimeTarget{1.0});
        const PhaseIntegral ph(sch);
        const auto m = matrix_element(ph, 0, Channel::Z, 0.25);
        CHECK(m.magnitude == doctest::Approx(0.75 / (4.0 * 0.544862367942584194)).epsilon(1e-14));
        CHECK(m.magnitude == doctest::Approx(0.344123600805842649).epsilon(1e-14));
        CHECK(m.relative_sign == -1);
        const auto mx = matrix_element(ph, 0, Channel::X, 0.25);
        CHECK(std::abs(m.value + mx.value) < 1e-15);
        const auto m1 = matrix_element(ph, 1, Channel::Z, 0.25);
        CHECK(m1.relative_sign == 1);
        CHECK(std::abs(m1.value - mx.value) < 1e-15);
    }
    SUBCASE("y channel is flagged") {
        const auto sch = Schedule::build(ScheduleKind::Uniform, GroverInstance::balanced(4), RuntimeTarget{1.0});
        const PhaseIntegral ph(sch);
        const auto m = matrix_element(ph, 0, Channel::Y, 0.5);
        CHECK(m.suppressed);
        CHECK(m.magnitude == doctest::Approx(1.0 / std::sqrt(15.0)));
        CHECK_THROWS_AS(matrix_element(ph, 0, Channel::X, 1.5), DomainError);
    }
}

TEST_CASE("adiabatic error estimate") {
    const auto inst = GroverInstance::balanced(6);
    const auto fast = Schedule::build(ScheduleKind::Uniform, inst, RuntimeTarget{1.0});
    const auto slow = Schedule::build(ScheduleKind::Uniform, inst, RuntimeTarget{100.0});
    CHECK(adiabatic_error_estimate(fast) / adiabatic_error_estimate(slow) == doctest::Approx(100.0).epsilon(1e-10));
    const auto t4a = Schedule::build(ScheduleKind::Uniform, GroverInstance::balanced(2), RuntimeTarget{1e3});
    const auto t4b = Schedule::build(ScheduleKind::Uniform, GroverInstance::balanced(2), RuntimeTarget{1e5});
    CHECK(adiabatic_error_estimate(t4a) * 1e3 == doctest::Approx(adiabatic_error_estimate(t4b) * 1e5).epsilon(1e-10));

    // normalized adapted schedule: dense sampling of the correction is flat around the crossing
    const auto g = GroverInstance::balanced(8);
    const auto sch = Schedule::build(ScheduleKind::GapSquared, g, ErrorTarget{0.1});
    CHECK(adiabatic_error_estimate(sch) == doctest::Approx(0.1).epsilon(1e-9));
    auto correction = [&](double s) { return sch.s_dot(s) * adiabatic_coupling(g, s) / std::pow(gap(g, s), 2); };
    double peak = 0.0;
    for (int k = 0; k <= 100000; ++k) peak = std::max(peak, correction(k / 100000.0));
    CHECK(peak == doctest::Approx(0.1).epsilon(1e-6));
    const double w = 0.05 / std::sqrt(g.N());
    for (double d = -w; d <= w; d += w / 10) CHECK(correction(0.5 + d) / peak > 0.99);
}
