#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vtpalm/image_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI inside `dir` with stdout and stderr captured together.
Run cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && env -u VTPALM_DATA_DIR '" VTPALM_CLI "' " + args +
                          " > cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "cli.log")};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

// Shared fixture: a small press set and a briefly trained mapper.
const fs::path& calibrated() {
  static const fs::path dir = [] {
    auto d = testing::scratch_dir("cli_calibrated");
    REQUIRE(cli(d, "--out p render presses --count 4").code == 0);
    REQUIRE(cli(d, "--out c --set max_epochs=3 calibrate-tactile p/manifest.csv").code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("fit-proximity on rendered samples") {
  const auto dir = testing::scratch_dir("cli_fit");
  REQUIRE(cli(dir, "--out s render samples").code == 0);
  const auto r = cli(dir, "--out f fit-proximity s/samples.csv");
  REQUIRE(r.code == 0);
  for (const char* f : {"model.txt", "fit_report.txt", "residuals.csv", "families.csv", "fit_plot.png"})
    CHECK(fs::exists(dir / "f" / f));
  const auto manifest = slurp(dir / "f" / "manifest.txt");
  CHECK(contains(manifest, "command=fit-proximity"));
  CHECK(contains(manifest, "file=model.txt "));
}

TEST_CASE("fit-proximity input errors") {
  const auto dir = testing::scratch_dir("cli_fit_errors");
  { std::ofstream(dir / "bad.csv") << "run_id,speed_cmps,z_world_cm,z_img\nr,1,20,3\nr,1,abc,3\n"; }
  auto r = cli(dir, "fit-proximity bad.csv");
  CHECK(r.code == 2);
  CHECK(contains(r.output, "corrupt-data"));
  CHECK(contains(r.output, "line 3"));

  { std::ofstream(dir / "empty.csv") << ""; }
  r = cli(dir, "fit-proximity empty.csv");
  CHECK(r.code == 2);
  CHECK(contains(r.output, "insufficient-samples"));

  r = cli(dir, "fit-proximity nowhere.csv");
  CHECK(r.code == 2);
  CHECK(contains(r.output, "missing-file"));
}

TEST_CASE("seeded generators are reproducible") {
  const auto dir = testing::scratch_dir("cli_seed");
  REQUIRE(cli(dir, "--seed 3 --out a render samples").code == 0);
  REQUIRE(cli(dir, "--seed 3 --out b render samples").code == 0);
  REQUIRE(cli(dir, "--seed 4 --out c render samples").code == 0);
  CHECK(slurp(dir / "a" / "samples.csv") == slurp(dir / "b" / "samples.csv"));
  CHECK(slurp(dir / "a" / "samples.csv") != slurp(dir / "c" / "samples.csv"));
}

TEST_CASE("calibrate-tactile is independent of the worker count") {
  const auto& dir = calibrated();
  REQUIRE(cli(dir, "--jobs 3 --out c3 --set max_epochs=3 calibrate-tactile p/manifest.csv").code == 0);
  CHECK(slurp(dir / "c" / "manifest.txt") == slurp(dir / "c3" / "manifest.txt"));
  CHECK(slurp(dir / "c" / "weights.vtpw") == slurp(dir / "c3" / "weights.vtpw"));
}

TEST_CASE("calibrate-tactile skips unreadable presses") {
  const auto& dir = calibrated();
  auto text = slurp(dir / "p" / "manifest.csv");
  text += "presses/missing.png,presses/reference_000.png,100,100,40\n";
  { std::ofstream(dir / "p" / "with_missing.csv") << text; }
  const auto r = cli(dir, "--out cm --set max_epochs=1 calibrate-tactile p/with_missing.csv");
  CHECK(r.code == 0);
  CHECK(contains(slurp(dir / "cm" / "skipped.txt"), "missing.png"));
  CHECK(fs::exists(dir / "cm" / "weights.vtpw"));
}

TEST_CASE("reconstruct") {
  const auto& dir = calibrated();
  REQUIRE(cli(dir, "--out one render press --depth 0.8").code == 0);
  auto r = cli(dir, "--out rec reconstruct one/press.png one/reference.png c/weights.vtpw");
  REQUIRE(r.code == 0);
  for (const char* f : {"height.vtp", "height.csv", "height_heat.png", "normal_z.png", "gradients.vtp"})
    CHECK(fs::exists(dir / "rec" / f));

  r = cli(dir, "--out flat reconstruct one/reference.png one/reference.png c/weights.vtpw");
  REQUIRE(r.code == 0);
  const auto h = vtpalm::read_vtp1(dir / "flat" / "height.vtp");
  REQUIRE(!h.planes.empty());
  for (double x : h.planes[0]) CHECK(x == 0.0);

  REQUIRE(cli(dir, "--out small --set tactile_width=128 render press").code == 0);
  r = cli(dir, "--out mism reconstruct small/press.png one/reference.png c/weights.vtpw");
  CHECK(r.code == 2);
  CHECK(contains(r.output, "dimension-mismatch"));
}

TEST_CASE("analyze") {
  const auto dir = testing::scratch_dir("cli_analyze");
  REQUIRE(cli(dir, "--out r render rough --size 128").code == 0);
  auto r = cli(dir, "--out a analyze --mode roughness --reference r/reference.png r/rough_150.png r/rough_500.png");
  REQUIRE(r.code == 0);
  const auto spec = vtpalm::load_image(dir / "a" / "spectrum_rough_150.png");
  CHECK(spec.width() == 128);
  CHECK(spec.height() == 128);
  CHECK(fs::exists(dir / "a" / "roughness.csv"));

  vtpalm::save_image(vtpalm::RasterImage(64, 64, 1, 0.5f), dir / "flat.png");
  r = cli(dir, "--out t analyze --mode texture flat.png flat.png");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "warning"));

  r = cli(dir, "--out t2 analyze --mode texture r/rough_150.png r/rough_500.png");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "t2" / "texture.csv"));
}

TEST_CASE("simulate-grasp") {
  const auto& dir = calibrated();
  REQUIRE(cli(dir, "--out s render samples").code == 0);
  REQUIRE(cli(dir, "--out f fit-proximity s/samples.csv").code == 0);
  { std::ofstream(dir / "scenario.cfg") << "speed = 8\n"; }
  const auto r = cli(dir, "--out g simulate-grasp scenario.cfg f/model.txt c/weights.vtpw");
  REQUIRE(r.code == 0);
  const auto report = slurp(dir / "g" / "scenario_report.txt");
  CHECK(contains(report, "final_mode=Grasping"));
  const auto log = slurp(dir / "g" / "commands.log");
  CHECK(contains(log, "kind=ServoPulse pulse_us=100"));
  CHECK(contains(log, "kind=GraspSignal"));
  for (const char* f : {"frames.csv", "tracking.csv", "distance_plot.png", "height.vtp"}) CHECK(fs::exists(dir / "g" / f));
}
