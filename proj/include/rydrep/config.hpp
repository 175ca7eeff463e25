#pragma once

#include <map>
#include <string>

#include "rydrep/rates.hpp"

namespace rydrep {

/// Flat `key=value` text, one entry per line, `#` comments. Keys match the
/// EfficiencyParams field names (P_R, P_gamma, P_B, t_o, d, c_fiber, n_G,
/// n_T, n_S, OD).
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Applies recognized keys onto `params`; throws on unknown keys.
void apply_config(EfficiencyParams& params, const std::map<std::string, std::string>& entries);

std::string params_to_config(const EfficiencyParams& params);

}  // namespace rydrep
