#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vform/ares.hpp"
#include "vform/dampc.hpp"
#include "vform/flock.hpp"
#include "vform/games.hpp"
#include "vform/pso.hpp"

namespace vform {

enum class Mode { Ares, Dampc, GameBrg, GameRdg, GameAmpc, SmcBatch };

const char* to_string(Mode mode);
bool mode_from_string(const std::string& name, Mode& out);

// Flat sectioned key=value configuration for the experiment CLI. Bird ids in
// config files (the game removal list) are 1-based, matching the usual
// wing-tip-to-wing-tip numbering; internal indices are 0-based.
struct ExperimentConfig {
    Mode mode = Mode::Ares;
    int birds = 3;
    std::uint64_t seed = 1;
    int runs = 0; // smc-batch: 0 means use the Chernoff-Hoeffding bound

    FlockParams flock;
    InitBounds init;
    PsoConfig pso;
    ares::AresConfig ares;
    dampc::DampcConfig dampc;
    games::GameConfig game;

    double smc_epsilon = 0.1;
    double smc_delta = 0.01;
    Mode smc_target = Mode::Ares;

    bool operator==(const ExperimentConfig&) const;
};

// Parses text; reports every malformed line, unknown key and bad value in
// `errors` (with section.key names) instead of stopping at the first.
ExperimentConfig parse_config(const std::string& text,
                              std::vector<std::string>& errors);

// Cross-field validation; appends one message per violated constraint.
void validate_config(const ExperimentConfig& cfg,
                     std::vector<std::string>& errors);

// Canonical serialization: fixed section/key order, 17 significant digits.
// parse_config(canonical_text(c)) reproduces c exactly.
std::string canonical_text(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical text, 16 lowercase hex digits. Embedded in every
// output file so results can be traced to the exact configuration.
std::string config_digest(const ExperimentConfig& cfg);

std::string format_g17(double v);

} // namespace vform
