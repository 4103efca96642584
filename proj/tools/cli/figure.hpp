#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "geophase/config.hpp"
#include "output.hpp"

namespace geophase::cli {

/// Presets directory: `override_dir` if given, else `presets/` next to the
/// executable, else the copy in the source tree.
std::filesystem::path preset_directory(const std::optional<std::filesystem::path>& override_dir);

/// Preset identifiers in `dir`, in natural order (fig1, fig2, ..., fig10).
std::vector<std::string> list_presets(const std::filesystem::path& dir);

nlohmann::json load_preset_file(const std::filesystem::path& path);
nlohmann::json load_preset(const std::filesystem::path& dir, const std::string& id);

/// Evaluates every panel of a preset into `out`: one CSV and one SVG per
/// panel plus `<id>_metadata.json`. `user` supplies keys the preset leaves
/// open; preset values win.
void build_figure(const nlohmann::json& preset, const ConfigValues& user, int jobs, OutputSet& out);

}  // namespace geophase::cli
