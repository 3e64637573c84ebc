#pragma once

#include "experiment.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>

namespace rcn {

//! Experiment settings read from a flat key=value file.
//!
//!     # comment
//!     name = fig1
//!     datasets = synthetic:1000x2; ../data/uci/wine.csv
//!     noise_pairs = 0.1:0.1; 0.4:0.4
//!     methods = plain; iw
//!
//! Lists are ';'-separated and noise pairs are written rho_plus:rho_minus.
//! Unknown keys and bad values raise ConfigError with the key and line.
struct ParsedConfig
{
  ExperimentSpec spec;
  bool seed_set = false;
};

//! Applies one setting. `line` is reported in errors (0 outside a file).
void
apply_setting(ParsedConfig& cfg,
              const std::string& key,
              const std::string& value,
              std::size_t line = 0,
              const std::string& base_dir = "");

//! Applies "key=value".
void
apply_assignment(ParsedConfig& cfg,
                 const std::string& assignment,
                 std::size_t line = 0,
                 const std::string& base_dir = "");

ParsedConfig
parse_config(std::istream& in, const std::string& base_dir = "");

//! Reads a file; dataset paths are relative to its directory.
ParsedConfig
load_config(const std::string& path);

} // namespace rcn
