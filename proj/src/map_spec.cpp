// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <string>

#include "awarp/error.hpp"
#include "awarp/mapping.hpp"

namespace awarp {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_spec(std::string_view spec, const std::string& why) {
  throw Error(ErrorKind::InvalidArgument, "map spec '" + std::string(spec) + "': " + why);
}

double to_double(std::string_view spec, const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_spec(spec, "value of '" + key + "' is not a number");
  }
  return out;
}

CoordinateMap grid_from_files(const std::string& xfile, const std::string& yfile) {
  const IntensityImage nx = read_image(xfile);
  const IntensityImage ny = read_image(yfile);
  if (nx.channels() != 1 || ny.channels() != 1 || !(nx.frame().nx == ny.frame().nx) ||
      !(nx.frame().ny == ny.frame().ny) || nx.frame().nx < 2 || nx.frame().ny < 2) {
    throw Error(ErrorKind::Format, "grid map: node rasters must be single-channel, "
                                   "equal-sized, at least 2x2");
  }
  const GridFrame cells = GridFrame::unit(nx.frame().nx - 1, nx.frame().ny - 1);
  return map_from_grid(cells, nx.values(), ny.values());
}

}  // namespace

CoordinateMap parse_map_spec(std::string_view spec) {
  const std::string s = trim(spec);
  const std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')') bad_spec(spec, "expected name(k=v,...)");
  const std::string name = trim(std::string_view(s).substr(0, open));
  const std::string body = s.substr(open + 1, s.size() - open - 2);

  std::map<std::string, std::string> args;
  std::size_t pos = 0;
  while (pos <= body.size() && !trim(body).empty()) {
    const std::size_t comma = std::min(body.find(',', pos), body.size());
    const std::string item = trim(std::string_view(body).substr(pos, comma - pos));
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) bad_spec(spec, "argument '" + item + "' lacks '='");
    const std::string key = trim(std::string_view(item).substr(0, eq));
    if (!args.emplace(key, trim(std::string_view(item).substr(eq + 1))).second) {
      bad_spec(spec, "duplicate key '" + key + "'");
    }
    pos = comma + 1;
    if (comma == body.size()) break;
  }

  auto allow = [&](std::set<std::string> keys) {
    for (const auto& [k, v] : args) {
      if (!keys.count(k)) bad_spec(spec, "unknown key '" + k + "'");
    }
  };
  auto num = [&](const std::string& key, double fallback) {
    const auto it = args.find(key);
    return it == args.end() ? fallback : to_double(spec, key, it->second);
  };

  if (name == "identity") {
    allow({});
    return map_identity();
  }
  if (name == "translate") {
    allow({"x", "y"});
    return map_translate(num("x", 0.0), num("y", 0.0));
  }
  if (name == "wavy") {
    allow({});
    return map_wavy();
  }
  if (name == "perspective") {
    allow({"a", "b", "c", "d"});
    return map_perspective(num("a", 0.25), num("b", -0.1), num("c", 0.5), num("d", 0.0));
  }
  if (name == "sin") {
    allow({});
    return map_sin();
  }
  if (name == "arcsin") {
    allow({});
    return map_arcsin();
  }
  if (name == "grid") {
    allow({"x", "y"});
    if (!args.count("x") || !args.count("y")) bad_spec(spec, "grid needs x=<file>,y=<file>");
    return grid_from_files(args.at("x"), args.at("y"));
  }
  bad_spec(spec, "unknown map '" + name + "'");
}

}  // namespace awarp
