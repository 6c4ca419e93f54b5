// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "emnav/autodiff/parameters.hpp"

namespace emnav {

/// Text checkpoint:
///
///   emnav-params 1
///   meta <key> <value>        (zero or more)
///   count <n>
///   param <name> <rows> <cols>
///   <hex-float values, row-major, space separated>
///
/// Values are written as C99 hex floats, so loading reproduces every bit.
struct Checkpoint {
  ParameterSet params;
  std::map<std::string, std::string> meta;
};

void write_checkpoint(std::ostream& out, const ParameterSet& params,
                      const std::map<std::string, std::string>& meta = {});
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params,
                     const std::map<std::string, std::string>& meta = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copy values from `source` into `target` by name; every target parameter must
/// exist in `source` with the same shape.
void assign_parameters(ParameterSet& target, const ParameterSet& source);

}  // namespace emnav
