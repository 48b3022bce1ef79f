#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "glpin/io.hpp"
#include "glpin/metric.hpp"

using namespace glpin;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string cli() {
  const char* p = std::getenv("GLPIN_CLI");
  return p ? p : "glpin";
}

fs::path scratch() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("glpin_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

Run run(const std::string& args) {
  fs::path err = scratch() / "stderr.txt";
  std::string cmd = cli() + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::array<char, 4096> buf;
  size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err.string());
  return r;
}

std::string write_scene(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

const char* kSymmetric = R"({"omega":{"type":"ball","center":[0,0,0],"radius":1},
  "inclusion":{"type":"ball","center":[0,0,0],"radius":0.5},"b":0.5,
  "singularities":{"positive":[[0,0,1]],"negative":[[0,0,-1]]}})";

}  // namespace

TEST(Cli, ValidateConcentricScene) {
  auto r = run("validate " + write_scene("sym.json", kSymmetric));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, InvalidSceneExitsTwoWithJsonError) {
  auto bad = write_scene("bad.json", R"({"omega":{"type":"ball","center":[0,0,0],"radius":1},
    "inclusion":{"type":"ball","center":[0.8,0,0],"radius":0.5},"b":0.5})");
  auto r = run("validate " + bad);
  EXPECT_EQ(r.code, 2);
  auto e = json::parse(r.err);
  EXPECT_EQ(e["error"], "InvalidScene");
  EXPECT_EQ(run("validate " + write_scene("junk.json", "{not json")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, DistanceMatchesLibrary) {
  auto sc = write_scene("sym.json", kSymmetric);
  auto r = run("distance " + sc + " --from -0.9,0,0 --to 0.9,0,0");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  Scene s = load_scene(sc).scene;
  EXPECT_EQ(j["value"].get<double>(), distance(s, {-0.9, 0, 0}, {0.9, 0, 0}));
  EXPECT_NEAR(j["value"].get<double>(), 0.8 + 0.25, 1e-12);
  EXPECT_EQ(j["phases"].size(), 3u);
  EXPECT_EQ(run("distance " + sc + " --from 5,0,0 --to 0,0,0").code, 2);
}

TEST(Cli, ConnectionFromCsvMatrix) {
  fs::path m = scratch() / "m.csv";
  std::ofstream(m) << "# test\n3,1,2\n1,3,3\n2,2,1\n";
  auto r = run("connection --matrix " + m.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["sigma"], json::array({1, 0, 2}));
  EXPECT_DOUBLE_EQ(j["length"].get<double>(), 3.0);
  std::ofstream(m) << "1,2\n3\n";
  EXPECT_EQ(run("connection --matrix " + m.string()).code, 2);
}

TEST(Cli, LinkWritesObjWithStamp) {
  auto out = scratch() / "link";
  auto r = run("link " + write_scene("sym.json", kSymmetric) + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["length"].get<double>(), 1.25, 1e-12);
  EXPECT_EQ(j["uniqueness"], "unique");
  std::string obj = read_file((out / "link.obj").string());
  EXPECT_NE(obj.find("config_hash=" + j["config_hash"].get<std::string>()), std::string::npos);
  EXPECT_NE(obj.find(std::string("version=") + kVersion), std::string::npos);
}

TEST(Cli, StructureFieldRoundTripAndDeterminism) {
  auto sc = write_scene("sym.json", kSymmetric);
  auto a = scratch() / "sa", b = scratch() / "sb";
  auto ra = run("structure " + sc + " --eta 0.05 --grid 0.125 --seed 4 --out " + a.string());
  auto rb = run("structure " + sc + " --eta 0.05 --grid 0.125 --seed 4 --out " + b.string());
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(ra.out, rb.out);
  std::string fa = read_file((a / "structure.field").string()), fb = read_file((b / "structure.field").string());
  EXPECT_EQ(fa, fb);
  auto f = parse_field(fa);
  auto j = json::parse(ra.out);
  EXPECT_EQ(f.config_hash, j["config_hash"]);
  EXPECT_EQ(f.version, kVersion);
  EXPECT_EQ(f.grid.dims[0], j["grid"]["dims"][0].get<int>());
  EXPECT_EQ(f.values.size(), f.grid.size());
  EXPECT_TRUE(j["passed"].get<bool>());
  // a different seed changes the hash
  auto rc = run("structure " + sc + " --eta 0.05 --grid 0.125 --seed 5");
  EXPECT_NE(json::parse(rc.out)["config_hash"], j["config_hash"]);
}

TEST(Cli, NumericalFailureExitsThree) {
  auto r = run("structure " + write_scene("sym.json", kSymmetric) + " --eta 0.01 --delta 0.2 --grid 0.125");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"], "EtaBudgetInfeasible");
}

TEST(Cli, RadialCsvAndDiagnostics) {
  auto out = scratch() / "radial";
  auto r = run("radial --r0 0.5 --b 0.5 --eps 0.01 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_GT(j["gamma"].get<double>(), 0);
  EXPECT_NEAR(j["eps_energy"].get<double>() / j["interface_cost"].get<double>(), 1, 0.1);
  std::string csv = read_file((out / "radial.csv").string());
  EXPECT_EQ(csv.rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(run("radial --eps 0.01 --nodes 5").code, 2);
}

TEST(Cli, TestFunctionEnergy) {
  auto out = scratch() / "energy";
  auto r = run("testfn-energy " + write_scene("sym.json", kSymmetric) + " --policy exact --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_LT(j["rel_err"].get<double>(), 0.05);
  std::string csv = read_file((out / "energy.csv").string());
  EXPECT_NE(csv.find("eps,ln_term,core,caps,strip,total"), std::string::npos);
}

TEST(Cli, ExportSceneRoundTrips) {
  auto sc = write_scene("sym.json", kSymmetric);
  auto r = run("export " + sc + " --what scene");
  ASSERT_EQ(r.code, 0) << r.err;
  auto again = write_scene("again.json", r.out);
  auto a = load_scene(sc), b = load_scene(again);
  EXPECT_EQ(a.scene.inclusion.radius(), b.scene.inclusion.radius());
  EXPECT_EQ(a.singularities.positives, b.singularities.positives);
  auto m = run("export " + sc + " --what matrix-csv");
  EXPECT_EQ(read_matrix_csv(m.out)[0][0], 1.25);
}

TEST(Cli, SymmetricAcceptanceSuite) {
  auto r = run("acceptance " + write_scene("sym.json", kSymmetric) + " --suite symmetric");
  auto j = json::parse(r.out);
  bool all = true;
  for (const auto& c : j["criteria"]) all &= c["passed"].get<bool>() || !c["disputed"].get<std::string>().empty();
  EXPECT_EQ(r.code, all ? 0 : 1);
  EXPECT_EQ(j["criteria"].size(), 5u);
}
