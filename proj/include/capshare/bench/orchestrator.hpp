#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

#include "capshare/config/config.hpp"
#include "capshare/sla/report.hpp"

namespace capshare::bench {

struct RunOptions {
    config::BenchConfig config;
    std::filesystem::path policy_dir;
    long steps = 0;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;
    // Directory holding the odu-sim and rapp executables.
    std::filesystem::path tools_dir;
    // Replace the configured ports with free ones.
    bool free_ports = false;
    std::chrono::seconds timeout{900};
};

/// Directory of the running executable.
std::filesystem::path executable_dir();

/// Starts odu-sim and rapp as child processes, runs `steps` periods, stops
/// both and emits the SLA report from the simulator's ground truth. A child
/// that dies early stops the other and flags the report as partial. Throws
/// nrm::DomainError when no step was recorded.
sla::RunReport orchestrate_run(const RunOptions &options);

} // namespace capshare::bench
