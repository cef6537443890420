// Acceptance gate: runs the ten release criteria end to end and prints one
// PASS/FAIL line per criterion.  Exits nonzero if any criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <functional>
#include <string>
#include <vector>

#include "annulib/io.hpp"

using namespace annulib;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", idx,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

CircleDiffeo moebiusDiffeo(cd a, int N) {
  const Eigen::VectorXd grid = thetaGrid(N);
  Eigen::VectorXcd disp(2 * N + 1);
  for (int j = 0; j < 2 * N + 1; ++j) {
    const cd z = std::polar(1.0, grid[j]);
    disp[j] = std::arg((z + a) / (cd(1.0, 0.0) + std::conj(a) * z) / z);
  }
  return CircleDiffeo::fromDisplacement(FourierSeries::analyze(disp));
}

CircleDiffeo randomDiffeo(std::mt19937& rng, int N, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierSeries p = FourierSeries::fromModes(N, {});
  for (int m = 1; m <= 4; ++m) {
    const cd c(u(rng), u(rng));
    p.setCoeff(m, c);
    p.setCoeff(-m, std::conj(c));  // real displacement
  }
  const double scale = amp / std::max(1e-12, p.supOnGrid());
  return CircleDiffeo::fromDisplacement(p * cd(scale, 0.0));
}

NormalizedAnnulus randomNearIdentity(std::mt19937& rng, int N) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 3) {
    case 0:
      return NormalizedAnnulus::round(0.95 + 0.05 * u(rng), N);
    case 1:
      return NormalizedAnnulus::fromDiffeo(randomDiffeo(rng, N, 0.05));
    default: {
      FourierSeries f = FourierSeries::fromModes(N, {});
      f.setCoeff(1, cd(0.96 + 0.03 * u(rng), 0.0));
      f.setCoeff(2, cd(0.005 * u(rng), 0.005 * u(rng)));
      f.setCoeff(3, cd(0.004 * u(rng), -0.004 * u(rng)));
      return NormalizedAnnulus::fromUnivalent(f);
    }
  }
}

// Random admissible generator: modes -1..3, pointwise Im >= margin, sup-norm
// scaled below `bound`.
FourierSeries randomConeField(std::mt19937& rng, int N, double bound) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierSeries f = FourierSeries::fromModes(N, {});
  double budget = 0.0;
  for (int m : {-1, 1, 2, 3}) {
    const cd c(0.2 * u(rng), 0.2 * u(rng));
    f.setCoeff(m, c);
    budget += std::abs(c);
  }
  f.setCoeff(0, cd(0.3 * u(rng), budget + 0.1));
  const double scale = bound / std::max(bound, f.supOnGrid());
  return f * cd(scale, 0.0);
}

// Closed-form characteristic flow for fields spanning modes -1..1.
cd lowModeFlow(const FourierSeries& X, double s, cd z) {
  const cd alpha = cd(0, 1) * X.coeff(-1);
  const cd beta = cd(0, 1) * X.coeff(0);
  const cd gamma = cd(0, 1) * X.coeff(1);
  const cd lam = std::sqrt(beta * beta / 4.0 - alpha * gamma);
  cd ch, shOverLam;
  if (std::abs(lam) < 1e-12) {
    ch = 1.0;
    shOverLam = s;
  } else {
    ch = std::cosh(s * lam);
    shOverLam = std::sinh(s * lam) / lam;
  }
  const cd m00 = ch + shOverLam * beta / 2.0;
  const cd m01 = shOverLam * alpha;
  const cd m10 = -shOverLam * gamma;
  const cd m11 = ch - shOverLam * beta / 2.0;
  return (m00 * z + m01) / (m10 * z + m11);
}

// ---------------------------------------------------------------------------

void criterion1() {
  const double tolC = 1e-8;
  double worstCoeff = 0.0, slowest = 0.0;
  bool pass = true;
  for (cd a : {cd(0.1, 0.0), cd(0.0, 0.3), cd(0.25, -0.2)}) {
    const auto start = std::chrono::steady_clock::now();
    const WeldingSolution w = weld(moebiusDiffeo(a, 128));
    slowest = std::max(slowest, seconds(start));

    // f_plus is the Taylor expansion of (z - a)/(1 - conj(a) z).
    for (int k = 0; k < 40; ++k) {
      const cd expect = (k == 0) ? -a
                                 : std::pow(std::conj(a), k - 1) *
                                       (1.0 - std::norm(a));
      worstCoeff = std::max(worstCoeff, std::abs(w.f_plus.coeff(k) - expect));
    }
    // f_minus is the identity: modes -38..1 carry exactly z.
    for (int n = -38; n <= 1; ++n) {
      const cd expect = (n == 1) ? cd(1.0, 0.0) : cd(0.0, 0.0);
      worstCoeff = std::max(worstCoeff, std::abs(w.f_minus.coeff(n) - expect));
    }
  }
  pass = worstCoeff <= tolC && slowest < 5.0;
  report(1, pass,
         fmt("Moebius welding: max coefficient error %.2e (tol 1e-8), "
             "slowest case %.2f s (limit 5 s)",
             worstCoeff, slowest));
}

// Known to fail at double precision: the exact welding pair for the
// displacement 0.3 sin(theta) has coefficient tails decaying by roughly a
// factor 0.4 per mode, which puts the order-32 truncation already at the
// rounding floor (~1e-15).  A further thousandfold drop by order 128 would
// need residuals near 1e-18, below what IEEE doubles can represent, so this
// check reports the measured ratio honestly rather than being loosened.
// tests/test_welding.cpp covers the same property in the resolution-limited
// regime (orders 8 -> 16 -> 24), where each octave buys more than 1e3.
void criterion2() {
  FourierSeries p32 = FourierSeries::fromModes(
      32, {{1, cd(0.0, -0.15)}, {-1, cd(0.0, 0.15)}});
  const double r32 =
      weld(CircleDiffeo::fromDisplacement(p32)).residual;
  const double r128 =
      weld(CircleDiffeo::fromDisplacement(p32.withOrder(128))).residual;
  const double ratio = r32 / std::max(r128, 1e-300);
  report(2, ratio > 1e3,
         fmt("spectral convergence: residual %.2e (N=32) -> %.2e (N=128), "
             "ratio %.1e (needs > 1e3)",
             r32, r128, ratio));
}

void criterion3() {
  const int N = 64;
  std::mt19937 rng(2026);
  double worstId = 0.0, worstMul = 0.0, worstAssoc = 0.0, worstThin = 0.0;

  const NormalizedAnnulus id = NormalizedAnnulus::identityElement(N);
  for (const NormalizedAnnulus& a :
       {NormalizedAnnulus::round(0.7, N),
        NormalizedAnnulus::fromDiffeo(randomDiffeo(rng, N, 0.1)), id}) {
    worstId = std::max(worstId, compose(a, id).distanceTo(a));
    worstId = std::max(worstId, compose(id, a).distanceTo(a));
  }

  std::uniform_real_distribution<double> uq(0.5, 0.95);
  for (int trial = 0; trial < 8; ++trial) {
    const double q1 = uq(rng), q2 = uq(rng);
    worstMul = std::max(
        worstMul, compose(NormalizedAnnulus::round(q1, N),
                          NormalizedAnnulus::round(q2, N))
                      .distanceTo(NormalizedAnnulus::round(q1 * q2, N)));
  }

  for (int trial = 0; trial < 20; ++trial) {
    const NormalizedAnnulus a = randomNearIdentity(rng, N);
    const NormalizedAnnulus b = randomNearIdentity(rng, N);
    const NormalizedAnnulus c = randomNearIdentity(rng, N);
    worstAssoc = std::max(worstAssoc, compose(compose(a, b), c)
                                          .distanceTo(compose(a, compose(b, c))));
  }

  for (int trial = 0; trial < 5; ++trial) {
    const CircleDiffeo psi1 = randomDiffeo(rng, N, 0.15);
    const CircleDiffeo psi2 = randomDiffeo(rng, N, 0.15);
    worstThin = std::max(
        worstThin,
        compose(NormalizedAnnulus::fromDiffeo(psi1),
                NormalizedAnnulus::fromDiffeo(psi2))
            .distanceTo(NormalizedAnnulus::fromDiffeo(psi1.composeWith(psi2))));
  }

  const bool pass = worstId <= 1e-7 && worstMul <= 1e-6 &&
                    worstAssoc <= 1e-6 && worstThin <= 1e-6;
  report(3, pass,
         fmt("semigroup laws: identity %.2e (tol 1e-7), moduli %.2e, ",
             worstId, worstMul) +
             fmt("associativity %.2e, thin-thin %.2e (tol 1e-6)", worstAssoc,
                 worstThin));
}

void criterion4() {
  const int N = 32;
  double worstRound = 0.0;
  for (double c : {0.1, 0.5, 1.0}) {
    const ExpResult r = expUniv(LiePath::constant(
        FourierSeries::fromModes(N, {{0, cd(0.0, c)}}), 65, 1.0));
    worstRound = std::max(
        worstRound,
        r.annulus.distanceTo(NormalizedAnnulus::round(std::exp(-c), N)));
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worstMob = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    FourierSeries X = FourierSeries::fromModes(N, {});
    const cd cm(0.15 * u(rng), 0.15 * u(rng));
    const cd cp(0.15 * u(rng), 0.15 * u(rng));
    X.setCoeff(-1, cm);
    X.setCoeff(1, cp);
    X.setCoeff(0, cd(0.4 * u(rng), std::abs(cm) + std::abs(cp) + 0.3));
    const int M = 33;
    const ExpResult r = expUniv(LiePath::constant(X, M, 1.0));
    const Eigen::VectorXd grid = thetaGrid(N);
    for (int k = 0; k < M; k += 4) {
      const double s = 1.0 - double(k) / (M - 1);
      for (int j = 0; j < 2 * N + 1; ++j)
        worstMob = std::max(
            worstMob, std::abs(r.framing.h(j, k) -
                               lowModeFlow(X, s, std::polar(1.0, grid[j]))));
    }
  }

  // Step-halving slope of the framing -> field round trip.
  const FourierSeries Xr = FourierSeries::fromModes(
      16, {{-1, cd(0.0, 0.2)}, {0, cd(0.0, 1.0)}, {1, cd(0.0, -0.1)}});
  std::vector<double> errs;
  for (int M : {9, 17, 33, 65}) {
    const LiePath p = LiePath::constant(Xr, M, 1.0);
    errs.push_back((pathFromFraming(expUniv(p).framing).samples() -
                    p.samples())
                       .cwiseAbs()
                       .maxCoeff());
  }
  double slope = 0.0;
  for (size_t i = 0; i + 1 < errs.size(); ++i)
    slope += std::log2(errs[i] / errs[i + 1]);
  slope /= double(errs.size() - 1);

  const bool pass = worstRound <= 1e-7 && worstMob <= 1e-6 &&
                    std::abs(slope - 4.0) <= 0.3;
  report(4, pass,
         fmt("exponential oracles: round %.2e (tol 1e-7), Moebius %.2e "
             "(tol 1e-6), ",
             worstRound, worstMob) +
             fmt("round-trip slope %.2f (needs 4 +/- 0.3)", slope));
}

void criterion5() {
  const int N = 16, M = 65;
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, supNorm = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    auto makePath = [&] {
      const FourierSeries f = randomConeField(rng, N, 0.22);
      const double phase = 2.0 * pi * u(rng);
      Eigen::MatrixXcd cols(2 * N + 1, M);
      for (int k = 0; k < M; ++k) {
        const double t = double(k) / (M - 1);
        cols.col(k) =
            f.samples() * (1.0 + 0.3 * std::sin(2.0 * pi * t + phase));
      }
      const LiePath raw(N, M, 1.0, cols);
      supNorm = std::max(supNorm, raw.supNorm());
      return makeSittingInstants(raw);
    };
    const LiePath a = makePath();
    const LiePath b = makePath();
    const NormalizedAnnulus joint = expUniv(concat(a, b)).annulus;
    const NormalizedAnnulus split =
        compose(expUniv(a).annulus, expUniv(b).annulus);
    worst = std::max(worst, joint.distanceTo(split));
  }
  report(5, worst <= 1e-6,
         fmt("exp(concat) vs compose(exp, exp): max distance %.2e over 10 "
             "pairs, sup-norms <= %.2f (tol 1e-6)",
             worst, supNorm));
}

void criterion6() {
  double worstDual = 0.0;
  for (int m = -10; m <= 10; ++m) {
    const FourierSeries f =
        FourierSeries::fromModes(12, {{m + 1, cd(1.0, 0.0)}});
    const FourierSeries g =
        FourierSeries::fromModes(12, {{-m + 1, cd(1.0, 0.0)}});
    const double expected = double(m) * (m - 1.0) * (m + 1.0) / 12.0;
    worstDual =
        std::max(worstDual, std::abs(cocycle(f, g) - cd(expected, 0.0)));
  }

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto randomField = [&] {
    FourierSeries f = FourierSeries::fromModes(5, {});
    for (int n = -4; n <= 4; ++n) f.setCoeff(n, cd(u(rng), u(rng)));
    return f;
  };
  double worstJacobi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const FourierSeries f = randomField();
    const FourierSeries g = randomField();
    const FourierSeries h = randomField();
    worstJacobi = std::max(
        worstJacobi, std::abs(cocycle(bracket(f, g), h) +
                              cocycle(bracket(g, h), f) +
                              cocycle(bracket(h, f), g)));
  }
  report(6, worstDual <= 1e-14 && worstJacobi <= 1e-12,
         fmt("cocycle: dual pairing error %.2e (tol 1e-14), Jacobi defect "
             "%.2e over 100 triples (tol 1e-12)",
             worstDual, worstJacobi));
}

void criterion7() {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worstClosed = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const int S = 17, T = 17;
    const double c1 = u(rng), c2 = u(rng), c3 = u(rng), c4 = u(rng);
    std::vector<FourierSeries> curves;
    curves.reserve(S * T);
    for (int a = 0; a < S; ++a) {
      const double al = 2.0 * pi * a / S;
      for (int b = 0; b < T; ++b) {
        const double be = 2.0 * pi * b / T;
        FourierSeries g = FourierSeries::fromModes(12, {});
        g.setCoeff(1, cd(1.0, 0.0));
        g.setCoeff(2, 0.05 * cd(c1 * std::cos(al), c2 * std::sin(be)));
        g.setCoeff(-1, 0.05 * cd(c3 * std::sin(al) * std::sin(be), 0.0));
        g.setCoeff(3, 0.05 * cd(c4 * std::cos(be), 0.2 * std::sin(al)));
        curves.push_back(g);
      }
    }
    worstClosed = std::max(
        worstClosed,
        std::abs(formIntegral(
            CurveFamily2D(S, T, true, true, 2.0 * pi, 2.0 * pi, curves))));
  }

  auto squareIntegral = [](double eps) {
    const int S = 9, T = 9;
    std::vector<FourierSeries> curves;
    curves.reserve(S * T);
    for (int a = 0; a < S; ++a) {
      const double s = double(a) / (S - 1);
      for (int b = 0; b < T; ++b) {
        const double t = double(b) / (T - 1);
        FourierSeries g = FourierSeries::fromModes(8, {});
        g.setCoeff(1, cd(1.0, 0.0));
        g.setCoeff(3, 0.5 * eps * cd(s, -t));
        g.setCoeff(-1, 0.5 * eps * cd(s, t));
        curves.push_back(g);
      }
    }
    return std::abs(formIntegral(
        CurveFamily2D(S, T, false, false, 1.0, 1.0, curves)));
  };
  const double f1 = squareIntegral(0.1);
  const double f2 = squareIntegral(0.05);
  const double f3 = squareIntegral(0.025);
  const double s1 = std::log2(f1 / f2);
  const double s2 = std::log2(f2 / f3);

  const bool pass = worstClosed <= 1e-6 && std::abs(s1 - 2.0) <= 0.2 &&
                    std::abs(s2 - 2.0) <= 0.2;
  report(7, pass,
         fmt("2-form: closed-surface integral %.2e (tol 1e-6), small-square "
             "slopes %.2f, %.2f (needs 2 +/- 0.2)",
             worstClosed, s1, s2));
}

void criterion8() {
  const int N = 64;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> uq(0.55, 0.8);
  double worst = 0.0, minThin = 1e300;
  bool geometryOk = true;
  for (int group = 0; group < 4; ++group) {
    const NormalizedAnnulus ann =
        compose(NormalizedAnnulus::fromDiffeo(randomDiffeo(rng, N, 0.12)),
                NormalizedAnnulus::round(uq(rng), N));
    minThin = std::min(minThin, ann.thinness());
    geometryOk = geometryOk && ann.innerCurve().windingAbout(cd(0, 0)) == 1;
    for (int rep = 0; rep < 5; ++rep) {
      FourierSeries omega = FourierSeries::fromModes(4, {});
      for (int k = -3; k <= 3; ++k) omega.setCoeff(k, cd(u(rng), u(rng)));
      worst = std::max(worst, cauchyConsistency(ann, omega));
    }
  }
  report(8, worst <= 1e-8 && minThin >= 0.05 && geometryOk,
         fmt("boundary integrals: max mismatch %.2e over 20 Laurent forms "
             "(tol 1e-8), min thinness %.3f (needs >= 0.05)",
             worst, minThin));
}

void criterion9() {
  const FourierSeries X = FourierSeries::fromModes(
      16, {{-1, cd(0.0, 0.2)}, {0, cd(0.0, 1.0)}, {1, cd(0.0, -0.1)}});
  std::vector<double> rh, rh2;
  for (int M : {9, 17, 33}) {
    const LiePath p = LiePath::constant(X, M, 1.0);
    const Framing fr = expUniv(p).framing;
    rh.push_back(xholoResidual(fr, p));
    rh2.push_back(transportResidual(fr.h.array().square().matrix(), p));
  }
  auto slopesOk = [](const std::vector<double>& r) {
    for (size_t i = 0; i + 1 < r.size(); ++i) {
      const double s = std::log2(r[i] / r[i + 1]);
      if (std::abs(s - 4.0) > 0.8) return false;
    }
    return true;
  };

  // v = z d/dz pulled back through radial framings: identically transported.
  const FourierSeries vz = FourierSeries::fromModes(4, {{1, cd(1.0, 0.0)}});
  double worstRadial = 0.0;
  for (int M : {17, 33}) {
    const LiePath p = LiePath::constant(
        FourierSeries::fromModes(16, {{0, cd(0.0, 0.6)}}), M, 1.0);
    worstRadial =
        std::max(worstRadial, pullbackFieldResidual(expUniv(p).framing, p, vz));
  }
  // Generic flows decay at fourth order.
  std::vector<double> rp;
  for (int M : {17, 33}) {
    const LiePath p = LiePath::constant(X, M, 1.0);
    rp.push_back(pullbackFieldResidual(
        expUniv(p).framing, p,
        FourierSeries::fromModes(4, {{2, cd(1.0, 0.0)}})));
  }
  const double pullSlope = std::log2(rp[0] / rp[1]);

  std::mt19937 rng(29);
  double worstMu = 0.0;
  long samples = 0;
  while (samples < 10000) {
    const FourierSeries f = randomConeField(rng, 24, 0.8);
    const LiePath p = LiePath::constant(f, 9, 1.0);
    worstMu = std::max(worstMu, beltrami(p).cwiseAbs().maxCoeff());
    samples += (2 * 24 + 1) * 9;
  }

  const bool pass = slopesOk(rh) && slopesOk(rh2) && worstRadial <= 1e-9 &&
                    std::abs(pullSlope - 4.0) <= 0.8 &&
                    worstMu <= 1.0 + 1e-12;
  report(9, pass,
         fmt("flow diagnostics: transport slopes ok=%.0f, radial pullback "
             "%.2e, ",
             (slopesOk(rh) && slopesOk(rh2)) ? 1.0 : 0.0, worstRadial) +
             fmt("generic pullback slope %.2f, max |mu| - 1 = %.2e over "
                 "10000 cone samples",
                 pullSlope, worstMu - 1.0));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10(std::chrono::steady_clock::time_point suiteStart) {
  const char* bin = std::getenv("ANNTOOL_BIN");
  if (!bin) {
    report(10, false, "ANNTOOL_BIN not set; cannot exercise the CLI");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("annulib_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const fs::path diffeo = dir / "phi.json";
  writeJsonFile(diffeo,
                toJson(CircleDiffeo::fromDisplacement(FourierSeries::fromModes(
                    32, {{1, cd(0.0, -0.2)}, {-1, cd(0.0, 0.2)}}))));
  const fs::path annulus = dir / "ann.json";
  writeJsonFile(annulus, toJson(NormalizedAnnulus::round(0.7, 32)));

  auto runTo = [&](const std::string& args, const fs::path& out) {
    const std::string cmd = std::string(bin) + " " + args + " > " +
                            out.string() + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };

  bool pass = true;
  for (const std::string args :
       {"weld " + diffeo.string(), "verify " + annulus.string()}) {
    const fs::path o1 = dir / "run1.txt";
    const fs::path o2 = dir / "run2.txt";
    pass = pass && runTo(args, o1) == 0 && runTo(args, o2) == 0;
    const std::string b1 = slurp(o1);
    pass = pass && !b1.empty() && b1 == slurp(o2);
  }
  std::error_code ec;
  fs::remove_all(dir, ec);

  report(10, pass,
         fmt("CLI determinism: weld and verify reruns byte-identical; "
             "acceptance runtime %.1f s",
             seconds(suiteStart)));
}

// An exception inside one criterion must not silence the others: report the
// failure with the message and keep going.
void guarded(int idx, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(idx, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(10, [&] { criterion10(start); });
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
