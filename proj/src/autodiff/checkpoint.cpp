// SPDX-License-Identifier: Apache-2.0
#include "emnav/autodiff/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emnav {
namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad value '" + token + "'");
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word)
    throw std::runtime_error("checkpoint: expected '" + word + "', found '" + got + "'");
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParameterSet& params,
                      const std::map<std::string, std::string>& meta) {
  out << "emnav-params 1\n";
  for (const auto& [k, v] : meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find_first_of(" \n") != std::string::npos)
      throw std::invalid_argument("checkpoint: meta entries must not contain whitespace");
    out << "meta " << k << ' ' << v << '\n';
  }
  out << "count " << params.size() << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = params.value(i);
    out << "param " << params.name(i) << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index j = 0; j < t.size(); ++j) out << (j == 0 ? "" : " ") << hex(t.data()[j]);
    out << '\n';
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  expect(in, "emnav-params");
  int version = 0;
  if (!(in >> version) || version != 1) throw std::runtime_error("checkpoint: unsupported version");
  Checkpoint ck;
  std::string word;
  while (in >> word && word == "meta") {
    std::string k, v;
    in >> k >> v;
    ck.meta[k] = v;
  }
  if (word != "count") throw std::runtime_error("checkpoint: expected 'count', found '" + word + "'");
  std::size_t count = 0;
  in >> count;
  for (std::size_t i = 0; i < count; ++i) {
    expect(in, "param");
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0)
      throw std::runtime_error("checkpoint: malformed parameter header");
    Matrix t(rows, cols);
    std::string token;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      if (!(in >> token)) throw std::runtime_error("checkpoint: truncated values for '" + name + "'");
      t.data()[j] = parse_hex(token);
    }
    ck.params.add(name, std::move(t));
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params,
                     const std::map<std::string, std::string>& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, params, meta);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  return read_checkpoint(in);
}

void assign_parameters(ParameterSet& target, const ParameterSet& source) {
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto& name = target.name(i);
    if (!source.contains(name)) throw std::runtime_error("checkpoint lacks parameter '" + name + "'");
    const auto& v = source[name];
    if (shape_of(v) != shape_of(target.value(i)))
      throw ShapeError("assign_parameters(" + name + ")", shape_of(target.value(i)), shape_of(v));
    target.value(i) = v;
  }
}

}  // namespace emnav
