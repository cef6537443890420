#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "annulib/io.hpp"

using namespace annulib;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

const std::string& binPath() {
  static const std::string bin = [] {
    const char* p = std::getenv("ANNTOOL_BIN");
    REQUIRE_MESSAGE(p != nullptr, "ANNTOOL_BIN must point at the CLI binary");
    return std::string(p);
  }();
  return bin;
}

const fs::path& workDir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("annulib_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string readFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const fs::path out = workDir() / "stdout.txt";
  const fs::path err = workDir() / "stderr.txt";
  const std::string cmd = binPath() + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, readFile(out), readFile(err)};
}

fs::path writeInput(const std::string& name, const json& j) {
  const fs::path p = workDir() / name;
  writeJsonFile(p, j);
  return p;
}

fs::path writeRaw(const std::string& name, const std::string& text) {
  const fs::path p = workDir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("weld emits a valid welding object") {
  const fs::path in =
      writeInput("rot.json", toJson(CircleDiffeo::rotation(0.5, 16)));
  const RunResult r = run("weld " + in.string());
  REQUIRE(r.code == 0);
  const WeldingSolution w = weldingFromJson(json::parse(r.out));
  CHECK(std::abs(w.f_plus.coeff(1) - std::polar(1.0, -0.5)) < 1e-8);
  CHECK(w.residual < 1e-8);

  // Chained solves run through the same interface.
  const RunResult r2 = run("weld " + in.string() + " --steps 3");
  CHECK(r2.code == 0);
  CHECK(detectKind(json::parse(r2.out)) == "welding");
}

TEST_CASE("outputs are byte identical across reruns") {
  const fs::path in = writeInput(
      "sine.json",
      toJson(CircleDiffeo::fromDisplacement(FourierSeries::fromModes(
          32, {{1, cd(0.0, -0.15)}, {-1, cd(0.0, 0.15)}}))));
  const fs::path o1 = workDir() / "weld1.json";
  const fs::path o2 = workDir() / "weld2.json";
  REQUIRE(run("weld " + in.string() + " --out " + o1.string()).code == 0);
  REQUIRE(run("weld " + in.string() + " --out " + o2.string()).code == 0);
  const std::string b1 = readFile(o1);
  const std::string b2 = readFile(o2);
  CHECK(!b1.empty());
  CHECK(b1 == b2);

  // stdout and --out carry the same bytes.
  const RunResult direct = run("weld " + in.string());
  CHECK(direct.out == b1);
}

TEST_CASE("compose accepts annuli and welding outputs alike") {
  const fs::path a =
      writeInput("q8.json", toJson(NormalizedAnnulus::round(0.8, 32)));
  const fs::path b =
      writeInput("q9.json", toJson(NormalizedAnnulus::round(0.9, 32)));
  const RunResult r = run("compose " + a.string() + " " + b.string());
  REQUIRE(r.code == 0);
  const NormalizedAnnulus c = annulusFromJson(json::parse(r.out));
  CHECK(c.distanceTo(NormalizedAnnulus::round(0.72, 32)) < 1e-6);

  // Welding outputs feed straight back in as thin annuli: the pair (f+, f-)
  // of weld(rot(a)) is the annulus glued along rot(-a), so composing the
  // rot(0.3) weld with itself turns the inner chart by -0.6.
  const fs::path rot =
      writeInput("rot2.json", toJson(CircleDiffeo::rotation(0.3, 32)));
  const fs::path wout = workDir() / "rotweld.json";
  REQUIRE(run("weld " + rot.string() + " --out " + wout.string()).code == 0);
  const RunResult rw =
      run("compose " + wout.string() + " " + wout.string() + " --modes 32");
  REQUIRE(rw.code == 0);
  const NormalizedAnnulus cw = annulusFromJson(json::parse(rw.out));
  CHECK(cw.order() == 32);
  CHECK(std::abs(cw.psiPlus().coeff(1) - std::polar(1.0, -0.6)) < 1e-6);
}

TEST_CASE("exp produces the framing of the generated annulus") {
  const LiePath p = LiePath::constant(
      FourierSeries::fromModes(16, {{0, cd(0.0, 0.5)}}), 33, 1.0);
  const fs::path in = writeInput("radial.json", toJson(p));
  const RunResult r = run("exp " + in.string());
  REQUIRE(r.code == 0);
  const Framing fr = framingFromJson(json::parse(r.out));
  CHECK(fr.annulus.distanceTo(
            NormalizedAnnulus::round(std::exp(-0.5), 16)) < 1e-6);

  const RunResult rt = run("exp " + in.string() + " --tsteps 65");
  REQUIRE(rt.code == 0);
  CHECK(framingFromJson(json::parse(rt.out)).M == 65);
}

TEST_CASE("cocycle prints the central pairing") {
  const fs::path f = writeInput(
      "l2.json", toJson(FourierSeries::fromModes(4, {{3, cd(1.0, 0.0)}})));
  const fs::path g = writeInput(
      "lm2.json", toJson(FourierSeries::fromModes(4, {{-1, cd(1.0, 0.0)}})));
  const RunResult r = run("cocycle " + f.string() + " " + g.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("kind") == "cocycle");
  CHECK(j.at("value")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(j.at("value")[1].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("verify passes healthy objects and flags broken ones") {
  const fs::path good =
      writeInput("good.json", toJson(NormalizedAnnulus::round(0.7, 32)));
  const RunResult ok = run("verify " + good.string());
  CHECK(ok.code == 0);
  const json okReport = json::parse(ok.out);
  for (const auto& row : okReport.at("checks"))
    CHECK(row.at("pass").get<bool>());

  // A series with heavy mass at the top of the band is unresolved.
  FourierSeries spike = FourierSeries::fromModes(16, {{1, cd(1.0, 0.0)}});
  spike.setCoeff(16, cd(1.0, 0.0));
  const fs::path bad = writeInput("spike.json", toJson(spike));
  const RunResult fail = run("verify " + bad.string());
  CHECK(fail.code == 1);
  const json failReport = json::parse(fail.out);
  bool sawResolved = false;
  for (const auto& row : failReport.at("checks"))
    if (row.at("name") == "resolved") {
      sawResolved = true;
      CHECK(!row.at("pass").get<bool>());
    }
  CHECK(sawResolved);

  // A tampered welding no longer matches along the seam.
  WeldingSolution w = weld(CircleDiffeo::fromDisplacement(
      FourierSeries::fromModes(16, {{1, cd(0.0, -0.1)}, {-1, cd(0.0, 0.1)}})));
  w.f_plus.setCoeff(3, w.f_plus.coeff(3) + cd(0.01, 0.0));
  const fs::path tampered = writeInput("tampered.json", toJson(w));
  const RunResult wr = run("verify " + tampered.string());
  CHECK(wr.code == 1);
  const json wrReport = json::parse(wr.out);
  for (const auto& row : wrReport.at("checks"))
    if (row.at("name") == "boundary_match") CHECK(!row.at("pass").get<bool>());
}

TEST_CASE("renderings carry the documented structure") {
  const fs::path in =
      writeInput("ann.json", toJson(NormalizedAnnulus::round(0.6, 32)));
  const RunResult svg = run("render " + in.string() + " --format svg");
  REQUIRE(svg.code == 0);
  CHECK(svg.out.find("<svg") != std::string::npos);
  CHECK(svg.out.find("boundary-out") != std::string::npos);
  CHECK(svg.out.find("boundary-in") != std::string::npos);

  const RunResult csv = run("render " + in.string() + " --format csv");
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("stroke,theta,re,im", 0) == 0);

  const RunResult js = run("render " + in.string() + " --format json");
  REQUIRE(js.code == 0);
  const json parsed = json::parse(js.out, nullptr, false);
  CHECK(!parsed.is_discarded());
}

TEST_CASE("failures exit with structured errors") {
  // Unreadable input.
  const fs::path garbage = writeRaw("garbage.json", "{\"kind\": \"four");
  const RunResult g = run("verify " + garbage.string());
  CHECK(g.code == 2);
  const json gerr = json::parse(g.err);
  CHECK(gerr.at("error").at("code").get<int>() == 2);

  // Missing file.
  CHECK(run("verify " + (workDir() / "nope.json").string()).code == 2);

  // Structurally valid path that violates the admissibility cone.
  const LiePath bad = LiePath::constant(
      FourierSeries::fromModes(8, {{0, cd(0.0, -0.5)}}), 9, 1.0);
  const fs::path badPath = writeInput("badpath.json", toJson(bad));
  const RunResult e = run("exp " + badPath.string());
  CHECK(e.code == 2);
  CHECK(json::parse(e.err).at("error").at("code").get<int>() == 2);

  // Bad usage.
  CHECK(run("bogus").code == 2);
  CHECK(run("").code == 2);
  const fs::path ok =
      writeInput("ok.json", toJson(NormalizedAnnulus::round(0.5, 8)));
  CHECK(run("render " + ok.string() + " --format tiff").code == 2);
}
