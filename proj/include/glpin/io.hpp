#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include "connection.hpp"
#include "grid.hpp"

namespace glpin {

using json = nlohmann::json;

struct SceneFile {
  Scene scene;
  SingularityData singularities;
};

inline Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::InvalidScene, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline ConvexBody body_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball") return ConvexBody::ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
  if (type == "polytope") {
    std::vector<Halfspace> hs;
    for (const auto& h : j.at("halfspaces")) {
      if (!h.is_array() || h.size() != 4) fail(ErrorCode::InvalidScene, "halfspace must be [nx, ny, nz, offset]");
      hs.push_back({{h[0].get<double>(), h[1].get<double>(), h[2].get<double>()}, h[3].get<double>()});
    }
    return ConvexBody::polytope(std::move(hs), j.value("rounding", 0.0));
  }
  fail(ErrorCode::InvalidScene, "unknown body type '" + type + "'");
}

inline json to_json(const ConvexBody& b) {
  if (b.is_ball()) return {{"type", "ball"}, {"center", to_json(b.center())}, {"radius", b.radius()}};
  json hs = json::array();
  for (const auto& h : b.halfspaces()) hs.push_back({h.normal.x, h.normal.y, h.normal.z, h.offset});
  json j{{"type", "polytope"}, {"halfspaces", hs}};
  if (b.rounding() > 0) j["rounding"] = b.rounding();
  return j;
}

//! Parses and validates a scene document; singularities are optional.
inline SceneFile scene_from_json(const json& j) {
  SceneFile f;
  try {
    f.scene = make_scene(body_from_json(j.at("omega")), body_from_json(j.at("inclusion")), j.at("b").get<double>());
    if (j.contains("singularities")) {
      for (const auto& p : j["singularities"].at("positive")) f.singularities.positives.push_back(vec_from_json(p));
      for (const auto& p : j["singularities"].at("negative")) f.singularities.negatives.push_back(vec_from_json(p));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidScene, std::string("malformed scene: ") + e.what());
  }
  if (f.singularities.k() > 0 || !f.singularities.negatives.empty())
    f.singularities = validate_singularities(f.scene, f.singularities);
  return f;
}

inline json to_json(const SceneFile& f) {
  json pos = json::array(), neg = json::array();
  for (const auto& p : f.singularities.positives) pos.push_back(to_json(p));
  for (const auto& p : f.singularities.negatives) neg.push_back(to_json(p));
  return {{"omega", to_json(f.scene.omega)},
          {"inclusion", to_json(f.scene.inclusion)},
          {"b", f.scene.b},
          {"singularities", {{"positive", pos}, {"negative", neg}}}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::BadInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SceneFile load_scene(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidScene, std::string("scene is not valid JSON: ") + e.what());
  }
  return scene_from_json(j);
}

//! 64-bit FNV-1a.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

//! Hash of the canonical (sorted-key, compact) dump of a config document.
inline std::string config_hash(const json& config) { return hex64(fnv1a64(config.dump())); }

// ---------------------------------------------------------------- CSV

//! Square matrix from CSV; lines starting with '#' are skipped.
inline Matrix read_matrix_csv(const std::string& text) {
  Matrix m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        fail(ErrorCode::BadInput, "non-numeric CSV cell '" + cell + "'");
      }
    }
    if (!row.empty()) m.push_back(std::move(row));
  }
  detail::check_matrix(m);
  return m;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string artifact_stamp(const std::string& hash) {
  return std::string("config_hash=") + hash + " version=" + kVersion;
}

inline std::string matrix_csv(const Matrix& m, const std::string& hash) {
  std::string s = "# " + artifact_stamp(hash) + "\n";
  for (const auto& r : m) {
    for (size_t j = 0; j < r.size(); ++j) s += (j ? "," : "") + format_double(r[j]);
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------- OBJ

inline std::string polylines_obj(const std::vector<std::vector<Vec3>>& lines, const std::string& hash) {
  std::string s = "# glpin polylines " + artifact_stamp(hash) + "\n";
  size_t base = 1;
  for (const auto& l : lines) {
    for (const auto& v : l) s += "v " + format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z) + "\n";
    s += "l";
    for (size_t i = 0; i < l.size(); ++i) s += " " + std::to_string(base + i);
    s += "\n";
    base += l.size();
  }
  return s;
}

// ---------------------------------------------------------------- fields

//! ASCII header terminated by "end\n", then dims product little-endian float64 values, x fastest.
inline std::string field_bytes(const GridSpec& g, const std::vector<double>& v, const std::string& hash) {
  if (v.size() != g.size()) fail(ErrorCode::ShapeMismatch, "field size does not match the grid");
  std::string s = "GLPINFIELD 1\n";
  s += "origin " + format_double(g.origin.x) + " " + format_double(g.origin.y) + " " + format_double(g.origin.z) + "\n";
  s += "h " + format_double(g.h) + "\n";
  s += "dims " + std::to_string(g.dims[0]) + " " + std::to_string(g.dims[1]) + " " + std::to_string(g.dims[2]) + "\n";
  s += "config_hash " + hash + "\nversion " + kVersion + "\nend\n";
  const size_t off = s.size();
  s.resize(off + 8 * v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    uint64_t bits;
    std::memcpy(&bits, &v[i], 8);
    for (int b = 0; b < 8; ++b) s[off + 8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return s;
}

struct FieldFile {
  GridSpec grid;
  std::vector<double> values;
  std::string config_hash, version;
};

inline FieldFile parse_field(const std::string& bytes) {
  FieldFile f;
  size_t pos = 0;
  auto next_line = [&]() {
    size_t e = bytes.find('\n', pos);
    if (e == std::string::npos) fail(ErrorCode::BadInput, "truncated field header");
    std::string l = bytes.substr(pos, e - pos);
    pos = e + 1;
    return l;
  };
  if (next_line() != "GLPINFIELD 1") fail(ErrorCode::BadInput, "not a field file");
  for (std::string l; (l = next_line()) != "end";) {
    std::istringstream ls(l);
    std::string key;
    ls >> key;
    if (key == "origin") ls >> f.grid.origin.x >> f.grid.origin.y >> f.grid.origin.z;
    else if (key == "h") ls >> f.grid.h;
    else if (key == "dims") ls >> f.grid.dims[0] >> f.grid.dims[1] >> f.grid.dims[2];
    else if (key == "config_hash") ls >> f.config_hash;
    else if (key == "version") ls >> f.version;
  }
  const size_t n = f.grid.size();
  if (bytes.size() - pos != 8 * n) fail(ErrorCode::ShapeMismatch, "payload size does not match dims");
  f.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= uint64_t(static_cast<unsigned char>(bytes[pos + 8 * i + b])) << (8 * b);
    std::memcpy(&f.values[i], &bits, 8);
  }
  return f;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
  out << bytes;
}

}  // namespace glpin
