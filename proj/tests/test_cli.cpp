#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hmt/mesh_io.hpp"
#include "run_config.hpp"

using namespace hmt;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "hmt_test_cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run_tool(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = "cd '" + kWork.string() + "' && '" HMT_TOOL "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(kWork / "stdout.txt"), slurp(kWork / "stderr.txt")};
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << body;
  return p;
}

const char* kSmall = R"(seed = 42
[geometry]
kind = concentric
radii = 1.0, 2.0
panels = 16, 32
[medium]
kappa0 = 1.0
kappa = 2.0
kappa_sigma = 1.5
[grid]
nx = 9
ny = 9
[probe]
angles = 32
[output]
prefix = out/small
)";

}  // namespace

TEST_CASE("shipped default config loads") {
  const cli::RunConfig c = cli::load_run_config(HMT_SOURCE_DIR "/configs/default.ini");
  CHECK(c.geometry == "concentric");
  CHECK(c.radii == std::vector<double>{1.0, 2.0});
  CHECK(c.panels == std::vector<int>{32, 64});
  CHECK(c.kappa0 == 2.0);
  CHECK(c.seed == 42);
  CHECK(c.n() == 1);
  CHECK(cli::has_mie(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(cli::load_run_config((kWork / "does_not_exist.ini").string()), Error);
  const auto unknown = write_config("unknown.ini", std::string(kSmall) + "[medium]\nkappa_typo = 3\n");
  CHECK_THROWS_WITH_AS(cli::load_run_config(unknown.string()), doctest::Contains("unknown config key"), Error);
  const auto badnum = write_config("badnum.ini", "[medium]\nkappa0 = fast\n");
  CHECK_THROWS_AS(cli::load_run_config(badnum.string()), Error);
  const auto negative = write_config("neg.ini", "[geometry]\nkind = disk\nradii = 1\npanels = 16\n[medium]\nkappa0 = -1\n");
  CHECK_THROWS_WITH_AS(cli::load_run_config(negative.string()), doctest::Contains("positive"), Error);
  const auto kind = write_config("kind.ini", "[geometry]\nkind = torus\n");
  CHECK_THROWS_AS(cli::load_run_config(kind.string()), Error);
  const auto table = write_config("table.ini", std::string(kSmall) + "[medium]\nkappa_sigma = table: /nonexistent/k.txt\n");
  CHECK_THROWS_AS(cli::load_run_config(table.string()), Error);
  const auto mesh = write_config("mesh.ini", "[geometry]\nkind = external-mesh\nmesh = /nonexistent.mesh\n");
  CHECK_THROWS_AS(cli::load_run_config(mesh.string()), Error);
  try {
    cli::load_run_config(unknown.string());
  } catch (const Error& e) {
    CHECK(cli::exit_code(e) == 2);
  }
  CHECK(cli::exit_code(Error(ErrorKind::near_singular, "x")) == 3);
  CHECK(cli::exit_code(Error(ErrorKind::size_mismatch, "x")) == 4);
}

TEST_CASE("comments and kappa_sigma forms") {
  const auto p = write_config("forms.ini", std::string("# hash comment\n; semicolon comment\n") + kSmall +
                                               "[medium]\nkappa_sigma = radial: 1.0, 0.5\ntie_kappa = true\n");
  const cli::RunConfig c = cli::load_run_config(p.string());
  CHECK(c.kappa_sigma.rfind("radial:", 0) == 0);
  CHECK(c.tie_kappa);
  CHECK_FALSE(cli::has_mie(c));
  const Problem pr = cli::build_problem(c, 1.25);
  CHECK(pr.medium({0.6, 0.8}) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(pr.kappa[1].magnitude() == 1.25);
}

TEST_CASE("csv export") {
  fs::create_directories(kWork);
  const std::string empty = (kWork / "sub" / "empty.csv").string();
  cli::write_csv(empty, {"x", "y", "re", "im"}, {});
  CHECK(slurp(empty) == "x,y,re,im\r\n");

  const double vals[] = {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 2.0};
  std::vector<std::vector<std::string>> rows;
  for (double v : vals) rows.push_back({cli::num(v), "a,b \"q\""});
  const std::string path = (kWork / "round.csv").string();
  cli::write_csv(path, {"value", "label"}, rows);
  const auto back = cli::read_csv(path);
  REQUIRE(back.size() == rows.size() + 1);
  CHECK(back[0] == std::vector<std::string>{"value", "label"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::strtod(back[i + 1][0].c_str(), nullptr) == vals[i]);
    CHECK(back[i + 1][1] == "a,b \"q\"");
  }
  CHECK(cli::num(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(cli::write_csv(path, {"a", "b"}, {{"1"}}), Error);
}

TEST_CASE("field grid") {
  cli::RunConfig c;
  c.grid_nx = 3;
  c.grid_ny = 2;
  const auto g = cli::field_grid(c);
  REQUIRE(g.size() == 6);
  CHECK(g[0].x == c.grid_xmin);
  CHECK(g[2].x == c.grid_xmax);
  CHECK(g[5].y == c.grid_ymax);
}

TEST_CASE("verify on the shipped default config exits 0") {
  const Run r = run_tool("verify --config '" HMT_SOURCE_DIR "/configs/default.ini'");
  CHECK(r.code == 0);
  for (const char* id : {"A1 PASS", "A2 PASS", "A3 PASS", "A4 PASS", "A5 PASS", "A6 PASS", "A7 PASS", "A12 PASS"})
    CHECK(r.out.find(id) != std::string::npos);
}

TEST_CASE("costabel on an n = 1 config exits 2") {
  const auto p = write_config("small.ini", kSmall);
  const Run r = run_tool("solve --config '" + p.string() + "' --formulation costabel");
  CHECK(r.code == 2);
  CHECK(r.err.find("costabel requires n=0") != std::string::npos);
}

TEST_CASE("bad command lines exit 2") {
  CHECK(run_tool("").code == 2);
  CHECK(run_tool("frobnicate").code == 2);
  CHECK(run_tool("solve").code == 2);
  CHECK(run_tool("verify --only A99").code == 2);
  CHECK(run_tool("--help").code == 0);
}

TEST_CASE("solve writes probe and field csv deterministically") {
  const auto p = write_config("small.ini", kSmall);
  const Run a = run_tool("solve --config '" + p.string() + "' --formulation stf --probe 3");
  REQUIRE(a.code == 0);
  const std::string probe = slurp(kWork / "out" / "small_probe.csv");
  const std::string field = slurp(kWork / "out" / "small_field.csv");
  CHECK(probe.rfind("angle,x,y,re,im\r\n", 0) == 0);
  CHECK(field.rfind("x,y,re,im\r\n", 0) == 0);
  CHECK(cli::read_csv((kWork / "out" / "small_probe.csv").string()).size() == 33);
  const Run b = run_tool("solve --config '" + p.string() + "' --formulation stf --probe 3");
  REQUIRE(b.code == 0);
  CHECK(slurp(kWork / "out" / "small_probe.csv") == probe);
  CHECK(slurp(kWork / "out" / "small_field.csv") == field);
}

TEST_CASE("sweep through a resonance writes every row") {
  const auto p = write_config("disk.ini", "[geometry]\nkind = disk\nradii = 1.0\npanels = 32\nvolume_h = 0.3\n"
                                          "[medium]\nkappa0 = 2.0\nkappa_sigma = 1.7\n[output]\nprefix = out/disk\n");
  const Run r = run_tool("sweep --config '" + p.string() + "' --formulation costabel --kmin 2.3 --kmax 2.5 --steps 5");
  CHECK(r.code == 0);
  const auto rows = cli::read_csv((kWork / "out" / "disk_sweep.csv").string());
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"k0", "sigma_min", "sigma_min_energy", "condition", "kind"});
  CHECK(rows[3][4] == "costabel");
  CHECK(std::stod(rows[5][0]) == 2.5);
}

TEST_CASE("converge and mie commands") {
  const auto p = write_config("small.ini", kSmall);
  const Run c = run_tool("converge --config '" + p.string() + "' --formulation mtf --levels 3");
  CHECK(c.code == 0);
  const auto rows = cli::read_csv((kWork / "out" / "small_converge.csv").string());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"level", "h", "dofs", "error", "order"});
  CHECK(std::stod(rows[3][3]) < std::stod(rows[1][3]));
  const Run m = run_tool("mie --config '" + p.string() + "'");
  CHECK(m.code == 0);
  CHECK(cli::read_csv((kWork / "out" / "small_mie_field.csv").string()).size() == 82);

  const auto half = write_config("half.ini", "[geometry]\nkind = halfdisk\nradii = 1, 2\npanels = 16\n"
                                             "[medium]\nkappa0 = 1\nkappa = 2\nkappa_sigma = 1.5\n");
  CHECK(run_tool("mie --config '" + half.string() + "'").code == 2);
  CHECK(run_tool("converge --config '" + half.string() + "' --levels 3").code == 2);
}

TEST_CASE("external mesh configs solve") {
  fs::create_directories(kWork);
  const Configuration disk = make_disk_config(1.0, 24, 0.3);
  write_volume_mesh((kWork / "disk.mesh").string(), disk.volume);
  const auto p = write_config("ext.ini", "[geometry]\nkind = external-mesh\nmesh = " + (kWork / "disk.mesh").string() +
                                             "\n[medium]\nkappa0 = 1.5\nkappa_sigma = 2.0\n[grid]\nnx = 5\nny = 5\n"
                                             "[probe]\nangles = 16\n[output]\nprefix = out/ext\n");
  const Run r = run_tool("solve --config '" + p.string() + "' --formulation costabel");
  CHECK(r.code == 0);
  CHECK(cli::read_csv((kWork / "out" / "ext_probe.csv").string()).size() == 17);
}
