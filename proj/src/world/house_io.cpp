// SPDX-License-Identifier: Apache-2.0
#include "emnav/world/house_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace emnav::world {

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw WorldError("cannot format real");
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& token) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw WorldError("malformed number '" + token + "'");
  return v;
}

void write_house(std::ostream& out, const House& house) {
  const auto& fs = house.feature_spec();
  out << "house " << house.id() << ' ' << house.structure_seed() << '\n';
  out << "features " << fs.dim << ' ' << format_real(fs.house_mix) << ' ' << format_real(fs.noise) << ' ' << fs.seed
      << '\n';
  for (const auto& r : house.rooms()) out << "room " << r.id << ' ' << room_type_name(r.type) << '\n';
  for (const auto& n : house.nodes())
    out << "node " << n.id << ' ' << format_real(n.position.x()) << ' ' << format_real(n.position.y()) << ' '
        << format_real(n.position.z()) << ' ' << n.room << '\n';
  for (auto [u, v] : house.undirected_edges()) out << "edge " << u << ' ' << v << '\n';
}

House read_house(std::istream& in) {
  int id = -1;
  std::uint64_t structure_seed = 0;
  FeatureSpec fs;
  bool have_features = false;
  std::vector<Room> rooms;
  std::vector<NavNode> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    auto fail = [&](const std::string& why) {
      return WorldError("house file line " + std::to_string(line_no) + ": " + why);
    };
    if (kind == "house") {
      if (!(ls >> id >> structure_seed)) throw fail("bad house header");
    } else if (kind == "features") {
      std::string mix, noise;
      if (!(ls >> fs.dim >> mix >> noise >> fs.seed)) throw fail("bad features line");
      fs.house_mix = parse_real(mix);
      fs.noise = parse_real(noise);
      have_features = true;
    } else if (kind == "room") {
      Room r;
      std::string type;
      if (!(ls >> r.id >> type)) throw fail("bad room line");
      if (r.id != static_cast<RoomId>(rooms.size())) throw fail("rooms must be listed in id order");
      r.type = room_type_from_name(type);
      rooms.push_back(std::move(r));
    } else if (kind == "node") {
      NavNode n;
      std::string x, y, z;
      if (!(ls >> n.id >> x >> y >> z >> n.room)) throw fail("bad node line");
      n.position = {parse_real(x), parse_real(y), parse_real(z)};
      if (n.room < 0 || static_cast<std::size_t>(n.room) >= rooms.size()) throw fail("node references unknown room");
      rooms[static_cast<std::size_t>(n.room)].nodes.push_back(n.id);
      nodes.push_back(n);
    } else if (kind == "edge") {
      NodeId u = 0, v = 0;
      if (!(ls >> u >> v)) throw fail("bad edge line");
      edges.emplace_back(u, v);
    } else {
      throw fail("unknown record '" + kind + "'");
    }
  }
  if (id < 0 || !have_features) throw WorldError("house file lacks header or features line");
  return House(id, std::move(nodes), std::move(rooms), edges, fs, structure_seed);
}

void save_house(const std::filesystem::path& path, const House& house) {
  std::ofstream out(path);
  if (!out) throw WorldError("cannot write " + path.string());
  write_house(out, house);
}

House load_house(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw WorldError("cannot read " + path.string());
  return read_house(in);
}

}  // namespace emnav::world
