// anntool: command-line front end for the annulus semigroup library.
//
// Subcommands: weld, compose, exp, cocycle, verify, render.
// Exit codes: 0 success, 1 failed verification, 2 malformed input or CLI
// usage, 3 solver failure.  All failures print a structured JSON diagnostic
// to stderr; nothing is ever left half-written on stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "annulib/io.hpp"

using namespace annulib;

namespace {

void emit(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) throw Error("io", "cannot write '" + outPath + "'");
  out << text;
}

int structuredError(int code, const std::string& stage,
                    const std::string& message) {
  json err{{"error", {{"code", code}, {"stage", stage}, {"message", message}}}};
  std::cerr << err.dump(2) << "\n";
  return code;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

struct Stroke {
  std::string cls;  // "boundary-out", "boundary-in", or "curve"
  Eigen::VectorXcd pts;
  bool closed;
};

std::vector<Stroke> strokesOf(const json& j) {
  const std::string kind = detectKind(j);
  if (kind == "annulus") {
    const NormalizedAnnulus a = annulusFromJson(j);
    return {{"boundary-out", a.psiMinus().samples(), true},
            {"boundary-in", a.psiPlus().samples(), true}};
  }
  if (kind == "welding") {
    const WeldingSolution w = weldingFromJson(j);
    return {{"boundary-out", w.f_minus.samples(), true},
            {"boundary-in", w.f_plus.samples(), true}};
  }
  if (kind == "framing") {
    const Framing fr = framingFromJson(j);
    return {{"boundary-out", fr.h.col(fr.M - 1), true},
            {"boundary-in", fr.h.col(0), true}};
  }
  if (kind == "velement") {
    const VirasoroElement e = velementFromJson(j);
    return {{"boundary-out", e.annulus.psiMinus().samples(), true},
            {"boundary-in", e.annulus.psiPlus().samples(), true}};
  }
  if (kind == "fourier" || kind == "curve")
    return {{"curve", fourierFromJson(j).samples(), true}};
  if (kind == "diffeo")
    return {{"curve", diffeoFromJson(j).circleImages(), true}};
  throw ValidationError("render", "kind '" + kind + "' is not renderable");
}

std::string renderSvg(const std::vector<Stroke>& strokes) {
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : strokes)
    for (int j = 0; j < s.pts.size(); ++j) {
      xlo = std::min(xlo, s.pts[j].real());
      xhi = std::max(xhi, s.pts[j].real());
      ylo = std::min(ylo, -s.pts[j].imag());
      yhi = std::max(yhi, -s.pts[j].imag());
    }
  const double pad = 0.05 * std::max(xhi - xlo, yhi - ylo) + 1e-6;
  xlo -= pad, ylo -= pad, xhi += pad, yhi += pad;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" "
         "height=\"480\" viewBox=\"" +
         fmt(xlo) + " " + fmt(ylo) + " " + fmt(xhi - xlo) + " " +
         fmt(yhi - ylo) + "\">\n";
  out += "  <style>\n"
         "    polyline { fill: none; stroke-width: " +
         fmt(0.008 * (xhi - xlo)) + "; }\n"
         "    .boundary-out { stroke: #1f77b4; }\n"
         "    .boundary-in  { stroke: #d62728; }\n"
         "    .curve        { stroke: #2ca02c; }\n"
         "  </style>\n";
  for (const auto& s : strokes) {
    out += "  <polyline class=\"" + s.cls + "\" points=\"";
    const int n = (int)s.pts.size();
    for (int j = 0; j <= (s.closed ? n : n - 1); ++j) {
      const cd p = s.pts[j % n];
      if (j) out += " ";
      out += fmt(p.real()) + "," + fmt(-p.imag());
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string renderCsv(const std::vector<Stroke>& strokes) {
  std::string out = "stroke,theta,re,im\n";
  for (const auto& s : strokes) {
    const int n = (int)s.pts.size();
    for (int j = 0; j < n; ++j) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", s.cls.c_str(),
                    2.0 * M_PI * j / n, s.pts[j].real(), s.pts[j].imag());
      out += buf;
    }
  }
  return out;
}

std::string renderAs(const json& j, const std::string& format) {
  if (format == "json") return dumpJson(j);
  const auto strokes = strokesOf(j);
  if (format == "svg") return renderSvg(strokes);
  if (format == "csv") return renderCsv(strokes);
  throw ValidationError("cli", "unknown format '" + format + "'");
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct CheckRow {
  std::string name;
  bool pass;
  double residual;
};

json rowsToJson(const std::vector<CheckRow>& rows) {
  json checks = json::array();
  for (const auto& r : rows)
    checks.push_back(
        {{"name", r.name}, {"pass", r.pass}, {"residual", r.residual}});
  return json{{"checks", checks}};
}

std::vector<CheckRow> verifyObject(const json& j, double tol) {
  const std::string kind = detectKind(j);
  std::vector<CheckRow> rows;

  if (kind == "fourier" || kind == "curve") {
    const FourierSeries f = fourierFromJson(j);
    rows.push_back({"resolved", f.tailFraction() <= std::max(tol, 1e-8),
                    f.tailFraction()});
    if (kind == "curve") {
      try {
        JordanCurve c(f);
        rows.push_back({"simple", true, c.injectivityRatio()});
      } catch (const Error&) {
        rows.push_back({"simple", false, 0.0});
      }
    }
    return rows;
  }

  if (kind == "diffeo") {
    const FourierSeries p = fourierFromJson(j, "diffeo");
    const double imag = p.maxImagOnGrid();
    rows.push_back(
        {"real_displacement",
         imag <= std::max(tol, 1e-9) * (1.0 + p.supOnGrid()), imag});
    try {
      const CircleDiffeo phi = CircleDiffeo::fromDisplacement(p);
      rows.push_back({"orientation", phi.minDerivative() > 0.0,
                      phi.minDerivative()});
      const double rt = phi.composeWith(phi.inverse())
                            .distanceTo(CircleDiffeo::identity(phi.order()));
      rows.push_back({"inverse_roundtrip", rt <= std::max(tol, 1e-8), rt});
    } catch (const Error&) {
      rows.push_back({"orientation", false, 0.0});
    }
    return rows;
  }

  if (kind == "welding") {
    const WeldingSolution w = weldingFromJson(j);
    const cd m1 = w.f_minus.coeff(1);
    const double norm = std::abs(m1 - cd(1.0, 0.0)) + std::abs(w.f_minus.coeff(0));
    rows.push_back({"outer_normalization", norm <= std::max(tol, 1e-9), norm});
    double sMinus = 0.0, sPlus = 0.0;
    w.f_minus.projectToModes(-w.f_minus.order(), 1, &sMinus);
    w.f_plus.projectToModes(0, w.f_plus.order(), &sPlus);
    const double support = std::hypot(sMinus, sPlus);
    rows.push_back({"analytic_support", support <= std::max(tol, 1e-9), support});
    const double mm = weldingMismatch(w.f_plus, w.f_minus, w.phi);
    rows.push_back({"boundary_match", mm <= tol, mm});
    return rows;
  }

  if (kind == "annulus") {
    try {
      const NormalizedAnnulus a = annulusFromJson(j);
      rows.push_back({"well_formed", true, 0.0});
      const double tail = std::max(a.psiMinus().tailFraction(),
                                   a.psiPlus().tailFraction());
      rows.push_back({"resolved", tail <= std::max(tol, 1e-8), tail});
      rows.push_back({"separation", a.thinness() >= 0.0, a.thinness()});
    } catch (const ValidationError&) {
      rows.push_back({"well_formed", false, 1.0});
    }
    return rows;
  }

  if (kind == "liepath") {
    const LiePath p = liePathFromJson(j);
    const double cone = p.coneDefect();
    rows.push_back(
        {"cone", cone <= std::max(tol, 1e-10) * (1.0 + p.supNorm()), cone});
    double bad = 0.0;
    for (int k = 0; k < p.timeNodes(); ++k) {
      double d = 0.0;
      p.slice(k).projectToModes(-1, p.order(), &d);
      bad = std::max(bad, d);
    }
    rows.push_back(
        {"disc_type", bad <= std::max(tol, 1e-10) * (1.0 + p.supNorm()), bad});
    return rows;
  }

  if (kind == "framing") {
    try {
      const Framing fr = framingFromJson(j);
      rows.push_back({"well_formed", true, 0.0});
      Eigen::VectorXcd circle(2 * fr.N + 1);
      const Eigen::VectorXd grid = thetaGrid(fr.N);
      for (int i = 0; i < circle.size(); ++i)
        circle[i] = cd(std::cos(grid[i]), std::sin(grid[i]));
      const double dOut = (fr.h.col(fr.M - 1) - circle).cwiseAbs().maxCoeff();
      rows.push_back({"boundary_outer", dOut <= std::max(tol, 1e-8), dOut});
      const double dIn =
          (fr.h.col(0) - fr.annulus.psiPlus().samples()).cwiseAbs().maxCoeff();
      rows.push_back({"boundary_inner", dIn <= std::max(tol, 1e-8), dIn});
      try {
        pathFromFraming(fr);
        rows.push_back({"orientation", true, 0.0});
      } catch (const Error&) {
        rows.push_back({"orientation", false, 1.0});
      }
    } catch (const ValidationError&) {
      rows.push_back({"well_formed", false, 1.0});
    }
    return rows;
  }

  if (kind == "velement") {
    try {
      const VirasoroElement e = velementFromJson(j);
      rows.push_back({"well_formed", true, 0.0});
      const double cone = e.path.coneDefect();
      rows.push_back(
          {"cone", cone <= std::max(tol, 1e-10) * (1.0 + e.path.supNorm()),
           cone});
      try {
        const double d = expUniv(e.path).annulus.distanceTo(e.annulus);
        rows.push_back({"generator_match", d <= std::max(tol, 1e-5), d});
      } catch (const Error&) {
        rows.push_back({"generator_match", false, 1e30});
      }
    } catch (const ValidationError&) {
      rows.push_back({"well_formed", false, 1.0});
    }
    return rows;
  }

  throw ValidationError("verify", "kind '" + kind + "' has no check suite");
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

NormalizedAnnulus readAnnulusLike(const std::string& path, int modes) {
  const json j = readJsonFile(path);
  const std::string kind = detectKind(j);
  NormalizedAnnulus a = [&] {
    if (kind == "annulus") return annulusFromJson(j);
    if (kind == "welding") {
      const WeldingSolution w = weldingFromJson(j);
      return NormalizedAnnulus::fromPair(w.f_minus, w.f_plus, w.residual);
    }
    throw ValidationError("compose",
                          "expected an annulus or welding, found '" + kind +
                              "'");
  }();
  if (modes > 0 && modes != a.order())
    a = NormalizedAnnulus::fromPair(a.psiMinus().withOrder(modes),
                                    a.psiPlus().withOrder(modes),
                                    a.residual());
  return a;
}

int runWeld(const std::string& in, int modes, int steps,
            const std::string& outPath, const std::string& format) {
  CircleDiffeo phi = diffeoFromJson(readJsonFile(in));
  if (modes > 0) phi = phi.withOrder(modes);
  const WeldingSolution w = steps > 1 ? weldFar(phi, steps) : weld(phi);
  emit(renderAs(toJson(w), format), outPath);
  return 0;
}

int runCompose(const std::string& inA, const std::string& inB, int modes,
               const std::string& outPath, const std::string& format) {
  const NormalizedAnnulus a = readAnnulusLike(inA, modes);
  const NormalizedAnnulus b = readAnnulusLike(inB, modes);
  emit(renderAs(toJson(compose(a, b)), format), outPath);
  return 0;
}

int runExp(const std::string& in, int tsteps, double tol,
           const std::string& outPath, const std::string& format) {
  LiePath p = liePathFromJson(readJsonFile(in));
  if (tsteps > 1 && tsteps != p.timeNodes()) p = resampleTime(p, tsteps);
  const ExpResult r = expUniv(p, tol > 0 ? tol : 1e-11);
  emit(renderAs(toJson(r.framing), format), outPath);
  return 0;
}

int runCocycle(const std::string& inF, const std::string& inG,
               const std::string& outPath) {
  const FourierSeries f = fourierFromJson(readJsonFile(inF));
  const FourierSeries g = fourierFromJson(readJsonFile(inG));
  const cd v = cocycle(f, g);
  emit(dumpJson(json{{"kind", "cocycle"},
                     {"value", json::array({v.real(), v.imag()})}}),
       outPath);
  return 0;
}

int runVerify(const std::string& in, double tol, const std::string& outPath) {
  const json j = readJsonFile(in);
  const auto rows = verifyObject(j, tol > 0 ? tol : 1e-6);
  emit(dumpJson(rowsToJson(rows)), outPath);
  for (const auto& r : rows)
    if (!r.pass) return 1;
  return 0;
}

int runRender(const std::string& in, const std::string& format,
              const std::string& outPath) {
  emit(renderAs(readJsonFile(in), format), outPath);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal welding, annulus composition, and flow exponentials"};
  app.require_subcommand(1);

  std::string inA, inB, outPath, format = "json";
  int modes = 0, tsteps = 0, steps = 1;
  double tol = 0.0;

  auto addCommon = [&](CLI::App* c, bool withFormat = true) {
    c->add_option("--out", outPath, "Write the result to a file");
    if (withFormat)
      c->add_option("--format", format, "Output format: json, svg, csv")
          ->check(CLI::IsMember({"json", "svg", "csv"}));
  };

  CLI::App* weldCmd = app.add_subcommand("weld", "Solve a conformal welding");
  weldCmd->add_option("phi", inA, "Circle diffeo JSON")->required();
  weldCmd->add_option("--modes", modes, "Resample to this mode order");
  weldCmd->add_option("--steps", steps,
                      "Split into incremental weldings (far from identity)");
  addCommon(weldCmd);

  CLI::App* composeCmd =
      app.add_subcommand("compose", "Compose two annuli (glue b inside a)");
  composeCmd->add_option("a", inA, "First annulus JSON")->required();
  composeCmd->add_option("b", inB, "Second annulus JSON")->required();
  composeCmd->add_option("--modes", modes, "Lift both to this mode order");
  addCommon(composeCmd);

  CLI::App* expCmd =
      app.add_subcommand("exp", "Time-ordered exponential of a field path");
  expCmd->add_option("path", inA, "Lie path JSON")->required();
  expCmd->add_option("--tsteps", tsteps, "Resample to this many time nodes");
  expCmd->add_option("--tol", tol, "Flow refinement tolerance");
  addCommon(expCmd);

  CLI::App* cocycleCmd =
      app.add_subcommand("cocycle", "Central pairing of two vector fields");
  cocycleCmd->add_option("f", inA, "First field JSON")->required();
  cocycleCmd->add_option("g", inB, "Second field JSON")->required();
  addCommon(cocycleCmd, false);

  CLI::App* verifyCmd =
      app.add_subcommand("verify", "Run the check suite for a serialized object");
  verifyCmd->add_option("file", inA, "Object JSON")->required();
  verifyCmd->add_option("--tol", tol, "Pass tolerance (default 1e-6)");
  addCommon(verifyCmd, false);

  CLI::App* renderCmd = app.add_subcommand("render", "Draw an object");
  renderCmd->add_option("file", inA, "Object JSON")->required();
  addCommon(renderCmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return structuredError(2, "cli", e.what());
  }

  try {
    if (weldCmd->parsed()) return runWeld(inA, modes, steps, outPath, format);
    if (composeCmd->parsed())
      return runCompose(inA, inB, modes, outPath, format);
    if (expCmd->parsed()) return runExp(inA, tsteps, tol, outPath, format);
    if (cocycleCmd->parsed()) return runCocycle(inA, inB, outPath);
    if (verifyCmd->parsed()) return runVerify(inA, tol, outPath);
    if (renderCmd->parsed()) return runRender(inA, format, outPath);
    return structuredError(2, "cli", "no command given");
  } catch (const ParseError& e) {
    return structuredError(2, e.stage(), e.what());
  } catch (const ValidationError& e) {
    return structuredError(2, e.stage(), e.what());
  } catch (const SolverError& e) {
    return structuredError(3, e.stage(), e.what());
  } catch (const Error& e) {
    return structuredError(3, e.stage(), e.what());
  } catch (const std::exception& e) {
    return structuredError(3, "internal", e.what());
  }
}
