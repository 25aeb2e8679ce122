// Game definition files (JSON). Schema: docs/game_file.md.
#pragma once

#include "shg/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace shg {

/// Parses a game definition. Relative data paths resolve against base_dir.
/// Throws ConfigError on schema problems (game-specific errors pass through).
Game parse_game_definition(const std::string& text, const std::filesystem::path& base_dir = ".",
                           std::uint64_t seed = 0);
Game load_game_file(const std::filesystem::path& path, std::uint64_t seed = 0);

}  // namespace shg
