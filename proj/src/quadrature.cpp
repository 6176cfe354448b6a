#include <advs/quadrature.hpp>

#include <cstdlib>
#include <string>

namespace advs {

void EvalBudget::charge(std::size_t n) {
    const std::size_t before = used_.fetch_add(n, std::memory_order_relaxed);
    if (before + n > limit_)
        throw BudgetExceeded("evaluation budget of " + std::to_string(limit_) + " integrand evaluations exhausted");
}

std::size_t EvalBudget::limit_from_env() {
    const char* raw = std::getenv("ADVS_BUDGET");
    if (raw == nullptr || *raw == '\0') return std::numeric_limits<std::size_t>::max();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || v == 0) throw ConfigError(std::string("ADVS_BUDGET is not a positive integer: ") + raw);
    return static_cast<std::size_t>(v);
}

namespace gk15 {

std::array<double, 15> nodes() {
    std::array<double, 15> x{};
    for (int i = 0; i < 7; ++i) {
        x[i] = -xk[i];
        x[14 - i] = xk[i];
    }
    x[7] = 0.0;
    return x;
}

std::array<double, 15> kronrod_weights() {
    std::array<double, 15> w{};
    for (int i = 0; i < 7; ++i) w[i] = w[14 - i] = wk[i];
    w[7] = wk[7];
    return w;
}

std::array<double, 15> gauss_weights() {
    std::array<double, 15> w{};
    for (int i = 1; i < 7; i += 2) w[i] = w[14 - i] = wg[i / 2];
    w[7] = wg[3];
    return w;
}

}  // namespace gk15

double quadpack_error(double diff, double resabs, double resasc) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    double err = diff;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return err;
}

}  // namespace advs
