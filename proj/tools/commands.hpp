#pragma once

#include "kronldp/structure.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace cli {

struct RunConfig {
    std::string command;
    std::optional<kronldp::StructureSet> structure;
    nlohmann::json params = nlohmann::json::object();  // the block named after the command
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
};

// Each returns the process exit code; errors propagate as exceptions.
int cmd_density(const RunConfig& cfg);
int cmd_rate(const RunConfig& cfg);
int cmd_outlier(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace cli
