#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "glpin/glpin.hpp"

using namespace glpin;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0, kExitFailed = 1, kExitValidation = 2, kExitNumerical = 3;

Vec3 parse_vec(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::BadInput, "bad coordinate '" + tok + "'");
    }
  }
  if (v.size() != 3) fail(ErrorCode::BadInput, "expected x,y,z but got '" + s + "'");
  return {v[0], v[1], v[2]};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::BadInput, "bad number '" + tok + "'");
    }
  }
  return v;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json geodesic_json(const Geodesic& g) {
  json verts = json::array(), phases = json::array();
  for (const auto& v : g.vertices) verts.push_back(vec_json(v));
  for (auto p : g.phases) phases.push_back(to_string(p));
  return {{"value", g.weighted_length}, {"kind", to_string(g.kind)}, {"vertices", verts}, {"phases", phases},
          {"non_unique", g.non_unique}};
}

struct Ctx {
  std::string scene_path, out_dir;
  uint64_t seed = 1;
  json flags = json::object();
  SceneFile scene;
  bool has_scene = false;
  std::string hash;

  void load() {
    if (scene_path.empty()) return;
    scene = load_scene(scene_path);
    has_scene = true;
  }
  void finalize(const std::string& command) {
    json cfg{{"command", command}, {"flags", flags}, {"seed", seed}};
    if (has_scene) cfg["scene"] = to_json(scene);
    hash = config_hash(cfg);
  }
  void need_scene() const {
    if (!has_scene) fail(ErrorCode::BadInput, "this command needs a scene file");
  }
  void need_pairs() const {
    need_scene();
    if (scene.singularities.k() == 0) fail(ErrorCode::InvalidSingularities, "scene has no singularities");
  }
  json stamp(json j) const {
    j["config_hash"] = hash;
    j["version"] = kVersion;
    return j;
  }
  //! Writes into the output directory when one was given.
  bool artifact(const std::string& name, const std::string& bytes) const {
    if (out_dir.empty()) return false;
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / name).string(), bytes);
    return true;
  }
  void emit(const json& j, const std::string& name) const {
    std::string text = stamp(j).dump(2) + "\n";
    artifact(name, text);
    std::cout << text;
  }
};

void error_json(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}, {"version", kVersion}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vorticity-line geometry toolkit for pinned Ginzburg-Landau problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Ctx ctx;

  auto common = [&](CLI::App* sc, bool scene_required) {
    auto* o = sc->add_option("scene", ctx.scene_path, "scene JSON file");
    if (scene_required) o->required();
    sc->add_option("--out", ctx.out_dir, "directory for artifacts");
    sc->add_option("--seed", ctx.seed, "seed for randomized checks");
  };

  // flag storage
  std::string from, to, matrix_path, compact_K, eps_list = "1e-2,1e-3,1e-4", policy = "a2", suite = "symmetric",
                                                  what = "scene";
  double delta = 0, eta = 0.05, struct_delta = -1, grid = 1.0 / 64, r0 = 0.5, b = 0.5, eps = 1e-2, tube_eta = 0.12;
  int nodes = 40;

  auto* validate = app.add_subcommand("validate", "check a scene file");
  common(validate, true);

  auto* distance_cmd = app.add_subcommand("distance", "weighted distance between two points");
  auto* geodesic_cmd = app.add_subcommand("geodesic", "minimizing polyline between two points");
  for (auto* sc : {distance_cmd, geodesic_cmd}) {
    common(sc, true);
    sc->add_option("--from", from, "x,y,z")->required();
    sc->add_option("--to", to, "x,y,z")->required();
    sc->add_option("--delta", delta, "inclusion dilation");
  }

  auto* connection_cmd = app.add_subcommand("connection", "minimal connection of the singularities");
  common(connection_cmd, false);
  connection_cmd->add_option("--matrix", matrix_path, "CSV distance matrix (positives by negatives)");
  connection_cmd->add_option("--delta", delta, "inclusion dilation");

  auto* link_cmd = app.add_subcommand("link", "geodesic link with uniqueness probe");
  common(link_cmd, true);
  link_cmd->add_option("--delta", delta, "inclusion dilation");

  auto* potential_cmd = app.add_subcommand("potential", "Lipschitz dual potential on the singularities");
  common(potential_cmd, true);
  potential_cmd->add_option("--delta", delta, "inclusion dilation");

  auto* structure_cmd = app.add_subcommand("structure", "certified structure function on a grid");
  common(structure_cmd, true);
  structure_cmd->add_option("--eta", eta, "gap budget");
  structure_cmd->add_option("--delta", struct_delta, "dilation (default: auto)");
  structure_cmd->add_option("--grid", grid, "grid step");
  structure_cmd->add_option("--compact-K", compact_K, "cx,cy,cz,r: make the field constant on this ball");

  auto* radial_cmd = app.add_subcommand("radial", "radial special solution");
  common(radial_cmd, false);
  radial_cmd->add_option("--r0", r0, "inclusion radius");
  radial_cmd->add_option("--b", b, "pinning contrast");
  radial_cmd->add_option("--eps", eps, "epsilon");
  radial_cmd->add_option("--nodes", nodes, "nodes per epsilon at the layer");

  auto* energy_cmd = app.add_subcommand("testfn-energy", "tube test-function energy ladder");
  common(energy_cmd, true);
  energy_cmd->add_option("--eps", eps_list, "comma-separated epsilons");
  energy_cmd->add_option("--eta", tube_eta, "tube radius");
  energy_cmd->add_option("--policy", policy, "a2 or exact")->check(CLI::IsMember({"a2", "exact"}));

  auto* acceptance_cmd = app.add_subcommand("acceptance", "acceptance criteria");
  common(acceptance_cmd, false);
  acceptance_cmd->add_option("--suite", suite, "symmetric (scene-driven) or full")->check(CLI::IsMember({"symmetric", "full"}));
  acceptance_cmd->add_option("--grid", grid, "grid step for the structure criterion (full suite)");

  auto* export_cmd = app.add_subcommand("export", "write scene, link OBJ or distance matrix CSV");
  common(export_cmd, true);
  export_cmd->add_option("--what", what, "scene, link-obj or matrix-csv")->check(CLI::IsMember({"scene", "link-obj", "matrix-csv"}));
  export_cmd->add_option("--delta", delta, "inclusion dilation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_json("BadInput", e.what());
    return kExitValidation;
  }

  CLI::App* sc = app.get_subcommands().front();
  const std::string cmd = sc->get_name();
  for (const auto* opt : sc->get_options())
    if (opt->count() > 0 && opt->get_name() != "scene" && opt->get_name() != "--out" && opt->get_name() != "--help")
      ctx.flags[opt->get_name()] = opt->as<std::string>();

  try {
    ctx.load();
    ctx.finalize(cmd);
    const Scene& s = ctx.scene.scene;
    const SingularityData& sing = ctx.scene.singularities;

    if (cmd == "validate") {
      auto r = validate_scene(s);
      ctx.emit({{"valid", r.valid}, {"clearance", r.clearance}, {"b", r.b}, {"k", sing.k()},
                {"inclusion_strictly_convex", r.inclusion_strictly_convex}, {"warnings", r.warnings}},
               "validate.json");
    } else if (cmd == "distance" || cmd == "geodesic") {
      Vec3 x = parse_vec(from), y = parse_vec(to);
      if (!s.omega.contains(x) || !s.omega.contains(y)) fail(ErrorCode::BadInput, "endpoints must lie in the closure of omega");
      auto g = geodesic(s, x, y, delta);
      ctx.emit(geodesic_json(g), cmd + ".json");
      if (cmd == "geodesic") ctx.artifact("geodesic.obj", polylines_obj({g.vertices}, ctx.hash));
    } else if (cmd == "connection") {
      Matrix d;
      if (!matrix_path.empty()) {
        d = read_matrix_csv(read_file(matrix_path));
      } else {
        ctx.need_pairs();
        ConvexBody body = s.inclusion.dilated(delta);
        d = distance_matrix(medium(s, body), sing);
      }
      auto c = minimal_connection(d);
      json pairs = json::array();
      for (size_t i = 0; i < c.sigma.size(); ++i)
        pairs.push_back({{"positive", i}, {"negative", c.sigma[i]}, {"distance", c.pair_distances[i]}});
      json out{{"sigma", c.sigma}, {"length", c.length}, {"pairs", pairs}, {"curves", json::array()}};
      if (d.size() > 1) out["second_best_length"] = second_best_cost(d, c);
      ctx.emit(out, "connection.json");
    } else if (cmd == "link") {
      ctx.need_pairs();
      ProbeOptions po;
      po.seed = ctx.seed;
      auto link = geodesic_link(s, sing, delta, po);
      json pairs = json::array(), curves = json::array();
      std::vector<std::vector<Vec3>> lines;
      for (size_t i = 0; i < link.curves.size(); ++i) {
        pairs.push_back({{"positive", i}, {"negative", link.connection.sigma[i]}, {"distance", link.connection.pair_distances[i]}});
        curves.push_back(geodesic_json(link.curves[i]));
        lines.push_back(link.curves[i].vertices);
      }
      ctx.emit({{"sigma", link.connection.sigma}, {"length", link.connection.length}, {"pairs", pairs},
                {"curves", curves}, {"uniqueness", to_string(link.unique_flag)}},
               "link.json");
      ctx.artifact("link.obj", polylines_obj(lines, ctx.hash));
    } else if (cmd == "potential") {
      ctx.need_pairs();
      ConvexBody body = s.inclusion.dilated(delta);
      Medium m = medium(s, body);
      auto c = minimal_connection(distance_matrix(m, sing));
      auto xi = dual_potential(full_distance_matrix(m, sing), c);
      ctx.emit({{"values", xi.values}, {"sum_differences", xi.gap}, {"length", c.length}, {"min_slack", xi.min_slack},
                {"sigma", c.sigma}},
               "potential.json");
    } else if (cmd == "structure") {
      ctx.need_pairs();
      StructureOptions o;
      o.h = grid;
      o.delta = struct_delta;
      o.certify.seed = ctx.seed;
      ScalarFieldGrid f;
      if (!compact_K.empty()) {
        auto v = parse_list(compact_K);
        if (v.size() != 4) fail(ErrorCode::BadInput, "--compact-K expects cx,cy,cz,r");
        f = structure_function_constant_on_K(s, sing, {v[0], v[1], v[2]}, v[3], eta, o);
      } else {
        f = structure_function(s, sing, eta, o);
      }
      json j = acceptance::certificate_json(f.certificate);
      j["grid"] = {{"origin", vec_json(f.grid.origin)}, {"h", f.grid.h}, {"dims", f.grid.dims}};
      j["singular_values"] = f.singular_values;
      ctx.emit(j, "structure.json");
      ctx.artifact("structure.field", field_bytes(f.grid, f.values, ctx.hash));
    } else if (cmd == "radial") {
      MeshSpec ms;
      ms.nodes_per_eps = nodes;
      auto p = solve_radial(r0, b, eps, ms);
      json j{{"energy", p.energy}, {"eps_energy", eps * p.energy}, {"residual", p.residual}, {"iterations", p.iterations},
             {"nodes", p.r.size()}, {"interface_cost", heteroclinic_cost_oracle(b) * 4 * kPi * r0 * r0}};
      if (p.has_fit) j.update({{"gamma", p.fit.gamma}, {"C", p.fit.C}, {"r2", p.fit.r2}});
      else j.update({{"gamma", nullptr}, {"C", nullptr}, {"r2", nullptr}});
      std::string csv = "# " + artifact_stamp(ctx.hash) + "\nr,U\n";
      for (size_t i = 0; i < p.r.size(); ++i) csv += format_double(p.r[i]) + "," + format_double(p.U[i]) + "\n";
      ctx.emit(j, "radial.json");
      ctx.artifact("radial.csv", csv);
    } else if (cmd == "testfn-energy") {
      ctx.need_pairs();
      auto pol = policy == "exact" ? StripPolicy::ExactProfile : StripPolicy::PinningWithStripBound;
      std::function<RadialProfile(double)> prof;
      if (pol == StripPolicy::ExactProfile) {
        if (!acceptance::detail::is_concentric_unit(s))
          fail(ErrorCode::ProfileUnavailable, "exact-profile policy needs a concentric unit scene");
        prof = [&](double e) { return solve_radial(s.inclusion.radius(), s.b, e); };
      }
      auto r = asymptotic_slope(s, sing, parse_list(eps_list), tube_eta, pol, prof);
      std::string csv = "# " + artifact_stamp(ctx.hash) + "\neps,ln_term,core,caps,strip,total\n";
      for (const auto& w : r.rows)
        csv += format_double(w.epsilon) + "," + format_double(w.energy.tube_log_term) + "," +
               format_double(w.energy.core_term) + "," + format_double(w.energy.cap_bound) + "," +
               format_double(w.energy.strip_correction) + "," + format_double(w.energy.total_upper) + "\n";
      ctx.emit({{"slope", r.slope}, {"target", r.target}, {"rel_err", r.rel_err}, {"bounded_offset", r.bounded_offset},
                {"policy", to_string(pol)}},
               "energy.json");
      ctx.artifact("energy.csv", csv);
    } else if (cmd == "acceptance") {
      std::vector<acceptance::Result> results;
      if (suite == "full") {
        results = acceptance::run_all(ctx.seed, grid);
      } else {
        ctx.need_pairs();
        results = acceptance::run_symmetric(s, sing, ctx.seed);
      }
      json arr = json::array();
      int failed = 0;
      for (const auto& r : results) {
        std::cerr << acceptance::line(r) << "\n";
        arr.push_back(acceptance::to_json(r));
        failed += !r.passed && r.disputed.empty();
      }
      ctx.emit({{"suite", suite}, {"criteria", arr}, {"all_passed", failed == 0}}, "acceptance.json");
      return failed ? kExitFailed : kExitOk;
    } else if (cmd == "export") {
      std::string name, bytes;
      if (what == "scene") {
        name = "scene.json";
        bytes = ctx.stamp(to_json(ctx.scene)).dump(2) + "\n";
      } else if (what == "link-obj") {
        ctx.need_pairs();
        auto link = geodesic_link(s, sing, delta);
        std::vector<std::vector<Vec3>> lines;
        for (const auto& g : link.curves) lines.push_back(g.vertices);
        name = "link.obj";
        bytes = polylines_obj(lines, ctx.hash);
      } else {
        ctx.need_pairs();
        ConvexBody body = s.inclusion.dilated(delta);
        name = "matrix.csv";
        bytes = matrix_csv(distance_matrix(medium(s, body), sing), ctx.hash);
      }
      if (!ctx.artifact(name, bytes)) std::cout << bytes;
    }
  } catch (const Error& e) {
    error_json(to_string(e.code()), e.what());
    return is_numerical(e.code()) ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    error_json("BadInput", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
