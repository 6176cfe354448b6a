#include <advs/spectral.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

using namespace advs;

TEST_CASE("power-law values") {
    const auto m = SpectralModel::power_law(2.0);
    CHECK(f_eval(m, 0.5).value == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f_eval(m, -0.5).value == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_FALSE(f_eval(m, 0.5).flat);
    CHECK(f_eval(m, 1.5).value == 0.0);
    CHECK(spectral_density(m, -1.01) == 0.0);
}

TEST_CASE("presets") {
    const auto photon3 = preset("photon_thermal", {.D = 3});
    CHECK(photon3.p == 2.0);
    CHECK(photon3.label == "photon_thermal(3)");
    CHECK(f_eval(photon3, -0.3).value == doctest::Approx(0.09));
    CHECK(preset_from_label("photon_thermal(1)").p == 0.0);
    CHECK(preset_from_label("phonon_thermal(3)").p == 0.0);
    const auto phonon1 = preset_from_label("phonon_thermal(1)");
    CHECK(phonon1.p == -2.0);
    CHECK(f_eval(phonon1, -0.1).value == doctest::Approx(100.0).epsilon(1e-12));
    const auto cold = preset_from_label("photon_thermal(2,T=0)");
    CHECK(cold.p == 2.0);
    CHECK(cold.theta == 0.0);
    CHECK(f_eval(cold, -0.5).value == 0.0);
    CHECK(f_eval(cold, 0.5).value == doctest::Approx(0.25));
    CHECK(preset_from_label("ohmic").p == 0.0);
    const auto mk = preset_from_label("markovian", {.A = 3.0});
    CHECK(mk.kind == SpectrumKind::MarkovianDelta);
    CHECK(f_eval(mk, 0.2).flat);
    CHECK(f_eval(mk, 0.2).value == doctest::Approx(3.0 / (2.0 * std::numbers::pi)));
    CHECK_THROWS_AS(spectral_density(mk, 0.2), DomainError);
    CHECK_THROWS_AS(preset("photon_thermal", {.D = 4}), ConfigError);
    CHECK_THROWS_AS(preset_from_label("laser(3)"), ConfigError);
    CHECK_THROWS_AS(preset_from_label("photon_thermal(x)"), ConfigError);
}

TEST_CASE("detailed balance limits") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(detailed_balance(-0.3, inf) == 1.0);
    CHECK(detailed_balance(0.3, 0.0) == 1.0);
    CHECK(detailed_balance(-0.3, 0.0) == 0.0);
    // x/(1 - e^-x) and its ratio e^x between the emission and absorption sides
    const double th = 0.2;
    CHECK(detailed_balance(0.3, th) / detailed_balance(-0.3, th) == doctest::Approx(std::exp(1.5)).epsilon(1e-13));
    CHECK(detailed_balance(0.0, th) == doctest::Approx(1.0));
    CHECK(detailed_balance(1e-9, th) == doctest::Approx(1.0).epsilon(1e-8));
    // high temperature approaches the thermal limit
    CHECK(detailed_balance(0.01, 1e6) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("effective channel weights") {
    CouplingConfig common{0.01, Topology::CommonBath, GroverInstance::from_bits("0101")};
    CHECK(effective_weight(common, ChannelWeights{1, 0, 0, 0}).combined[0][0] == 16.0);
    CHECK(effective_weight(common, ChannelWeights{1, 1, 1, 1}).topology[0][1] == 0.0);
    CHECK(effective_weight(common, ChannelWeights{1, 1, 1, 1}).topology[1][1] == 0.0);
    CouplingConfig indep{0.01, Topology::IndependentBaths, GroverInstance::from_bits("0111")};
    CHECK(effective_weight(indep, ChannelWeights{0, 0, 0, 1}).combined[1][1] == 4.0);
    CHECK(effective_weight(indep, ChannelWeights{1, 0, 0, 0}).total == 4.0);
    // permuting qubits and flipping all bits (zz) leave the weights unchanged
    for (auto topo : {Topology::CommonBath, Topology::IndependentBaths}) {
        const ChannelWeights all{1, 1, 1, 1};
        const auto a = effective_weight({0.01, topo, GroverInstance::from_bits("00101")}, all);
        const auto b = effective_weight({0.01, topo, GroverInstance::from_bits("10010")}, all);
        const auto c = effective_weight({0.01, topo, GroverInstance::from_bits("11010")}, all);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(a.topology[i][j] == b.topology[i][j]);
        CHECK(a.topology[1][1] == c.topology[1][1]);
    }
}

TEST_CASE("flat band kernel") {
    const auto m = SpectralModel::power_law(0.0, 1.5);
    const auto k = correlation_kernel(m, 10.0);
    CHECK(k(0.0).real() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(std::abs(k(0.0).imag()) < 1e-12);
    CHECK(std::abs(k(std::numbers::pi)) < 1e-9);
    for (double tau : {0.37, 2.0, 7.7})
        CHECK(k(tau).real() == doctest::Approx(3.0 * std::sin(tau) / tau).epsilon(1e-9));
}

TEST_CASE("kernel hermiticity and normalization") {
    const auto m = SpectralModel::power_law(2.0, 1.0, 0.0, 1.0, 0.3);
    const auto k = correlation_kernel(m, 50.0);
    QuadOptions o;
    o.rel_tol = 1e-12;
    o.breakpoints = {0.0};
    const double total = integrate([&](double w) { return spectral_density(m, w); }, -1.0, 1.0, o);
    CHECK(k(0.0).real() == doctest::Approx(total).epsilon(1e-9));
    for (double tau : {0.1, 3.3, 17.0, 49.0}) CHECK(std::abs(k(-tau) - std::conj(k(tau))) < 1e-12);
    CHECK_THROWS_AS(k(51.0), DomainError);
    // box spectrum against its sinc transform
    const auto box = SpectralModel::box(-0.5, -0.4, 2.0);
    const auto kb = correlation_kernel(box, 40.0);
    for (double tau : {0.0, 1.0, 13.1, 39.0}) {
        const cplx ref = tau == 0.0 ? cplx(0.2, 0.0)
                                    : 2.0 * std::polar(1.0, 0.45 * tau) * 2.0 * std::sin(0.05 * tau) / tau;
        CHECK(std::abs(kb(tau) - ref) < 1e-9);
    }
}

TEST_CASE("kernel transforms back to the spectrum") {
    const auto m = SpectralModel::power_law(2.0);
    const double tmax = 600.0, sigma = 100.0, h = 0.1;
    const auto k = correlation_kernel(m, tmax);
    for (double w : {-0.7, -0.5, -0.25, 0.4}) {
        // Gaussian-windowed inverse transform (window width 1/sigma in omega)
        cplx acc = 0.0;
        const int M = static_cast<int>(tmax / h);
        for (int j = -M; j <= M; ++j) {
            const double tau = j * h;
            acc += k(tau) * std::polar(1.0, w * tau) * std::exp(-0.5 * tau * tau / (sigma * sigma));
        }
        const double back = (acc * h).real() / (2.0 * std::numbers::pi);
        CHECK(back == doctest::Approx(w * w).epsilon(1e-3));
    }
}

TEST_CASE("delta kernel and infrared divergence") {
    const auto k = correlation_kernel(SpectralModel::markovian(2.5), 100.0);
    CHECK(k.is_delta());
    CHECK(k.delta_strength() == 2.5);
    CHECK_THROWS_AS(k(0.0), DomainError);
    CHECK(infrared_divergent(preset_from_label("phonon_thermal(1)")));
    CHECK(infrared_divergent(SpectralModel::power_law(-1.0)));
    CHECK_FALSE(infrared_divergent(SpectralModel::power_law(-0.5)));
    CHECK_THROWS_AS(correlation_kernel(preset_from_label("phonon_thermal(1)"), 10.0), InfraredDivergence);
    CHECK_THROWS_AS(correlation_kernel(SpectralModel::power_law(-1.0), 10.0), InfraredDivergence);
    // with an infrared cutoff the same law is fine
    const auto cut = SpectralModel::power_law(-2.0, 1.0, 0.05, 1.0);
    CHECK_NOTHROW(correlation_kernel(cut, 10.0));
}

TEST_CASE("integrable infrared singularity") {
    const auto m = SpectralModel::power_law(-0.5);
    const auto k = correlation_kernel(m, 5.0);
    CHECK(k(0.0).real() == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("tabulated spectra") {
    const auto m = SpectralModel::tabulated({-1.0, 0.0, 1.0}, {0.0, 2.0, 0.0});
    CHECK(f_eval(m, -0.5).value == doctest::Approx(1.0));
    CHECK(f_eval(m, 1.5).value == 0.0);
    const auto k = correlation_kernel(m, 5.0);
    CHECK(k(0.0).real() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(SpectralModel::tabulated({0.0, 0.0}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(SpectralModel::tabulated({0.0, 1.0}, {1.0, -1.0}), ConfigError);

    const std::string path = "test_spectral_table.csv";
    {
        std::ofstream out(path);
        out << "# measured\nomega,f\n-1,0\n-0.5,1\n0,2\n1,0\n";
    }
    const auto loaded = load_tabulated_csv(path);
    CHECK(f_eval(loaded, -0.25).value == doctest::Approx(1.5));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_tabulated_csv("no_such_file.csv"), ConfigError);
}

TEST_CASE("JSON serialization") {
    auto m = SpectralModel::power_law(1.0, 2.0, 0.01, 0.9, 0.25);
    m.channels = {1.0, 0.5, 0.5, 0.25};
    const auto back = spectral_model_from_json(to_json(m));
    CHECK(back.kind == m.kind);
    CHECK(back.p == m.p);
    CHECK(back.C == m.C);
    CHECK(back.omega_min == m.omega_min);
    CHECK(back.omega_max == m.omega_max);
    CHECK(back.theta == m.theta);
    CHECK(back.channels == m.channels);
    const auto inf = spectral_model_from_json(to_json(SpectralModel::power_law(2.0)));
    CHECK(std::isinf(inf.theta));
    const auto box = spectral_model_from_json(to_json(SpectralModel::box(1.0, 2.0, 3.0)));
    CHECK(box.kind == SpectrumKind::Box);
    CHECK(box.hi == 2.0);
    CHECK_THROWS_AS(spectral_model_from_json(nlohmann::json{{"kind", "power_law"}, {"colour", 1}}), ConfigError);
    CHECK_THROWS_AS(spectral_model_from_json(nlohmann::json{{"kind", "laser"}}), ConfigError);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(SpectralModel::power_law(1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(SpectralModel::power_law(1.0, 1.0, 0.5, 0.2), ConfigError);
    CHECK_THROWS_AS(SpectralModel::box(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(parse_topology("shared"), ConfigError);
    CouplingConfig bad;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
