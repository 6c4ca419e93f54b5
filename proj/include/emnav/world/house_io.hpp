// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "emnav/world/house.hpp"

namespace emnav::world {

/// Line-oriented house file:
///
///   house <id> <structure-seed>
///   features <dim> <house-mix> <noise> <feature-seed>
///   room <id> <type>          (one per room, ascending id)
///   node <id> <x> <y> <z> <room>
///   edge <u> <v>              (u < v)
///
/// Reals use the shortest decimal form that reads back to the same double,
/// so write/read round-trips exactly. View features are regenerated from the
/// seeds on load.
void write_house(std::ostream& out, const House& house);
House read_house(std::istream& in);

void save_house(const std::filesystem::path& path, const House& house);
House load_house(const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double.
std::string format_real(double v);
double parse_real(const std::string& token);

}  // namespace emnav::world
