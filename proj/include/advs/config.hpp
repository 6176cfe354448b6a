#pragma once

#include <advs/sweep.hpp>

#include <json.hpp>

#include <string>

namespace advs {

/// Single JSON document driving p1 and sweep runs. Unknown keys are rejected.
struct RunConfig {
    SweepSpec sweep;
    PresetParams preset_params;
    std::string out_dir = ".";
    /// csv, json or dat
    std::string format = "csv";
    std::string prefix = "sweep";
    /// Cap on integrand evaluations shared by all rows; 0 = ADVS_BUDGET or unlimited.
    std::size_t budget = 0;
    /// Reserved; always 0.
    int seed = 0;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);
/// "4,6,8", "4..14" or "4..14:2".
std::vector<int> parse_n_list(const std::string& text);

}  // namespace advs
