#pragma once

#include <advs/grover.hpp>
#include <advs/interpolant.hpp>
#include <advs/quadrature.hpp>

#include <json.hpp>

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace advs {

/// Interpolation laws: constant velocity, ds/dt = c gap^2, ds/dt = c gap, or a user table.
enum class ScheduleKind { Uniform, GapSquared, GapLinear, CustomTable };

ScheduleKind parse_schedule_kind(std::string_view name);
std::string_view to_string(ScheduleKind kind);
/// Power p in ds/dt = c gap^p (0 for Uniform). Throws for CustomTable.
int gap_power(ScheduleKind kind);

struct RuntimeTarget {
    double T;
};
/// Fix the adiabatic error estimate max_t |<E1|dH/dt|E0>|/gap^2.
struct ErrorTarget {
    double epsilon;
};
struct VelocityTarget {
    double c;
};
using ScheduleTarget = std::variant<RuntimeTarget, ErrorTarget, VelocityTarget>;

struct ScheduleOptions {
    double rel_tol = 1e-12;
    std::size_t max_nodes = 100'000;
    EvalBudget* budget = nullptr;
};

/// max over s of |<E1|dH/ds|E0>| gap^(p-2): the adiabatic error per unit velocity scale c.
double error_per_velocity(const GroverInstance& instance, int p);

/// Immutable schedule s(t) on [0, T]. Copies share the tabulated data.
class Schedule {
public:
    static Schedule build(ScheduleKind kind, const GroverInstance& instance, ScheduleTarget target,
                          const ScheduleOptions& opts = {});
    /// Monotone (t, s) samples starting at (0, 0) and ending at (T, 1); linear in between.
    static Schedule custom(const GroverInstance& instance, std::vector<std::pair<double, double>> samples);

    ScheduleKind kind() const;
    const GroverInstance& instance() const;
    double T() const;
    /// Velocity scale: ds/dt = c gap^p. For Uniform c = 1/T; for CustomTable c = 1/T as well.
    double c() const;

    double s_of_t(double t) const;
    double t_of_s(double s) const;
    double s_dot(double s) const;
    double dt_ds(double s) const;

    /// Stored monotone grid of (t, s) pairs.
    std::vector<std::pair<double, double>> grid() const;
    std::size_t node_count() const;
    /// Interior s values where ds/dt is not smooth (CustomTable nodes); empty otherwise.
    std::vector<double> kinks() const;

private:
    struct Data;
    explicit Schedule(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    std::shared_ptr<const Data> d_;
};

/// Runtime T at fixed adiabatic error for each qubit count.
std::vector<std::pair<int, double>> runtime_scaling_sweep(ScheduleKind kind, const std::vector<int>& n_list,
                                                          double epsilon);

nlohmann::json to_json(const Schedule& schedule, std::size_t max_grid_points = 0);
Schedule schedule_from_json(const nlohmann::json& doc);

}  // namespace advs
