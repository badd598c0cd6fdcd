#pragma once

#include <string>

#include "cflm/solver.hpp"

namespace cflm {

struct Config {
    Grid grid;
    Params params;
    RunConfig run;
    std::string output_dir = "out";
    int snapshot_every = 0;  // snapshots every N output points; 0 = final only

    bool operator==(const Config& o) const;
};

// Flat key = value format, one key per line, '#' comments; [section] headers
// prefix the keys that follow. Defaults are applied (epsilon = (kappa-1/16)/2,
// dealias on). Errors name the offending key and line.
Config parse_config(const std::string& text);

Config load_config(const std::string& path);

// Canonical serialization; parse(serialize(parse(text))) == parse(text).
std::string serialize_config(const Config& cfg);

}  // namespace cflm
