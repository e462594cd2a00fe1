#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "aep/engine.hpp"
#include "aep/model.hpp"

namespace aep {

// Optional "aep" block of a config document. Unset fields leave the
// engine defaults (or command-line values) alone.
struct AepSettings {
    std::optional<int> depth;
    std::optional<RationalAlpha> alpha;
    std::optional<Strategy> strategy;
    std::optional<bool> extrapolate;
};

struct ModelConfig {
    JointModel model;
    AepSettings aep;
};

// Parses a JSON model document. Syntax errors report line and column;
// schema errors report the offending field path (e.g. marginals[1].theta).
// Throws ConfigError.
ModelConfig parse_config(std::string_view text, std::string_view source = "<config>");
ModelConfig load_config(const std::filesystem::path& path);

Strategy parse_strategy(std::string_view name);

}  // namespace aep
