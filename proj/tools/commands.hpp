#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ymcli {

struct RunConfig {
    std::string command;
    std::string graph;
    std::vector<std::string> loops;
    int group_size = 2;
    int samples = 10000;
    int rw_steps = 0;
    std::uint64_t seed = 0;
    int shards = 1;
    double fd_step = 0; // <= 0: default
    std::vector<std::string> areas;
    std::string format = "json";
    // master
    bool cross_check = false;
    int oracle_size = 512;
    // sweep: "F=lo:hi:count"
    std::vector<std::string> sweep;
    std::string method = "master";
    // local-mm
    int grid = 64;
};

struct Report {
    nlohmann::ordered_json json;
    std::string text; // csv for sweeps, empty otherwise
    int exit_code = 0;
};

extern const char* const kVersion;

Report dispatch(const RunConfig& config);

// Maps module errors to exit codes: 2 for input errors, 1 for numeric failures.
int exit_code_for(const std::exception& e);

} // namespace ymcli
