#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "geophase/params.hpp"

namespace geophase {

/// Raised for malformed configuration text or unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw `key = value` pairs, in the order-independent form used for merging.
using ConfigValues = std::map<std::string, std::string>;

/// Keys accepted by the config parser and the CLI flag layer.
const std::vector<std::string>& known_config_keys();

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
/// Throws ConfigError naming the offending line.
ConfigValues parse_config(std::istream& in, const std::string& source_name = "<config>");
ConfigValues load_config_file(const std::string& path);

/// Overlays `overrides` on top of `base` (flags win over file values).
ConfigValues merge_config(ConfigValues base, const ConfigValues& overrides);

/// Parses a real number; also accepts multiples of pi such as `pi/8`,
/// `-pi/2` and `3*pi/4`.
double parse_real(const std::string& text);

struct ResolvedConfig {
  NonstaticityParams params = NonstaticityParams::static_wave();
  WaveConfig wave;
  std::vector<std::string> warnings;
};

/// Builds validated parameters from raw values. When both Q0 and A0 are
/// present, A0 is used and a warning is recorded.
ResolvedConfig resolve_config(const ConfigValues& values);

/// Canonical `key = value` text of a resolved configuration (shortest
/// round-trip numbers, fixed key order).
std::string describe_config(const ResolvedConfig& cfg);

}  // namespace geophase
