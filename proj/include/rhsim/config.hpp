#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rhsim/experiments.hpp"
#include "rhsim/sim.hpp"

namespace rhsim {

std::uint64_t parse_count(std::string_view text, const std::string& key);
double parse_real(std::string_view text, const std::string& key);
bool parse_flag(std::string_view text, const std::string& key);
/// Comma-separated list, items trimmed, empty items dropped.
std::vector<std::string> split_list(std::string_view text);

/// Flat `key = value` settings. Later layers override earlier ones, which is
/// how built-in defaults < config file < command line is realised.
using Settings = std::map<std::string, std::string, std::less<>>;

/// `key = value` lines; '#' starts a comment; blank lines ignored. Duplicate
/// keys in one file are rejected.
Settings parse_settings(std::string_view text, const std::string& origin = "config");
Settings load_settings(const std::string& path);
/// `over` wins on every key it defines.
Settings merge_settings(const Settings& base, const Settings& over);

/// Keys understood by apply_settings(), in documentation order.
const std::vector<std::string>& known_keys();

/// Applies every key in `s` to `config`. `policy` is applied before the other
/// policy keys so it can install its default eviction rule. Unknown keys and
/// bad values throw ConfigError naming the key.
void apply_settings(SimConfig& config, const Settings& s);

/// `patterns` is "suite" (the 500-pattern suite), "suite:unaligned",
/// "suite:aligned" or a ';'-separated list of pattern shorthands; `aligned`
/// applies to the shorthands.
std::vector<AttackPattern> patterns_from_settings(const Settings& s);

/// `axis`, `axis_values`, `seeds`, `patterns` plus the simulation keys.
SweepSpec sweep_from_settings(const Settings& s);

}  // namespace rhsim
