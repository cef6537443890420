#include "annulib/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace annulib {

namespace {

// Non-vanishing derivative of a univalent candidate, probed on concentric
// grids.  `radii` distinguishes the interior (r <= 1) from the exterior
// (r >= 1) side.
void checkDerivative(const FourierSeries& f, std::initializer_list<double> radii,
                     const char* side) {
  const int n = f.gridSize();
  const Eigen::VectorXd grid = thetaGrid(f.order());
  for (double r : radii) {
    for (int j = 0; j < n; ++j) {
      const cd z = r * cd(std::cos(grid[j]), std::sin(grid[j]));
      if (std::abs(f.derivPoint(z)) < 1e-12)
        throw ValidationError(
            "annulus", std::string("derivative of the ") + side +
                           " map vanishes near |z| = " + std::to_string(r));
    }
  }
}

int windingOfSamplesAbout(const Eigen::VectorXcd& pts,
                          const Eigen::VectorXcd& tangents, cd p) {
  cd acc(0.0, 0.0);
  for (int j = 0; j < pts.size(); ++j) acc += tangents[j] / (pts[j] - p);
  return (int)std::lround((acc / cd(0.0, (double)pts.size())).real());
}

// Newton inversion of an exterior Laurent map at each target; solutions live
// in |u| >= 1 for the exact map.  The truncated map's roots can sit a hair
// inside the circle (by its truncation-tail error), so iterates may dip to
// |u| = 0.999 — where the deepest Laurent mode amplifies by < 15% — instead
// of being pinned to the circle, which would stall Newton's last digits.
// `achieved` returns the worst |E(u) - target| over the nodes.
Eigen::VectorXcd invertExteriorPoints(const FourierSeries& E,
                                      const Eigen::VectorXcd& targets,
                                      double* achieved) {
  const cd c1 = E.coeff(1);
  const cd b0 = E.coeff(0);
  const int n = (int)targets.size();
  Eigen::VectorXcd out(n);
  const double scale = targets.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    cd u = (targets[j] - b0) / c1;
    if (std::abs(u) < 0.999) u *= 0.999 / std::abs(u);
    cd best = u;
    double bestErr = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
      const cd f = E.evalPoint(u) - targets[j];
      if (std::abs(f) < bestErr) {
        bestErr = std::abs(f);
        best = u;
      }
      if (bestErr < 2e-13 * (1.0 + scale)) break;
      const cd df = E.derivPoint(u);
      if (std::abs(df) < 1e-14)
        throw SolverError("compose", "exterior inversion hit a critical point");
      u -= f / df;
      if (std::abs(u) < 0.999) u *= 0.999 / std::abs(u);
    }
    if (bestErr > 1e-10 * (1.0 + scale))
      throw SolverError("compose", "exterior inversion did not converge");
    worst = std::max(worst, bestErr);
    out[j] = best;
  }
  if (achieved) *achieved = worst;
  return out;
}

// Newton inversion of an interior Taylor map; solutions in |v| <= 1.  Warm
// start from the previous node, radial continuation from the anchor for the
// first one.
Eigen::VectorXcd invertInteriorPoints(const FourierSeries& I,
                                      const Eigen::VectorXcd& targets,
                                      double* achieved) {
  const cd anchor = I.coeff(0);
  const cd d0 = I.coeff(1);
  const int n = (int)targets.size();
  const double scale = 1.0 + targets.cwiseAbs().maxCoeff();
  Eigen::VectorXcd out(n);
  double worst = 0.0;
  cd v(0.0, 0.0);
  auto newton = [&](cd target, cd start, bool record) {
    cd x = start;
    // Targets on the boundary image can leave the iteration bouncing at the
    // rounding floor; keep the best iterate and accept it at noise level.
    cd best = x;
    double bestErr = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      const cd f = I.evalPoint(x) - target;
      if (std::abs(f) < bestErr) {
        bestErr = std::abs(f);
        best = x;
      }
      if (bestErr < 2e-13 * scale) break;
      const cd df = I.derivPoint(x);
      if (std::abs(df) < 1e-14)
        throw SolverError("compose", "interior inversion hit a critical point");
      x -= f / df;
      if (std::abs(x) > 1.05) x *= 1.05 / std::abs(x);
    }
    if (bestErr > 1e-10 * scale)
      throw SolverError("compose", "interior inversion did not converge");
    if (record) worst = std::max(worst, bestErr);
    return best;
  };
  for (int j = 0; j < n; ++j) {
    if (j == 0) {
      v = (targets[0] - anchor) / d0 * 0.1;
      for (int s = 1; s <= 10; ++s)
        v = newton(anchor + (targets[0] - anchor) * (0.1 * s), v, s == 10);
    } else {
      v = newton(targets[j], v, true);
    }
    out[j] = v;
  }
  if (achieved) *achieved = worst;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constructors and validation
// ---------------------------------------------------------------------------

NormalizedAnnulus NormalizedAnnulus::identityElement(int N) {
  FourierSeries id = FourierSeries::fromModes(N, {{1, cd(1.0, 0.0)}});
  return NormalizedAnnulus(id, id, 0.0);
}

NormalizedAnnulus NormalizedAnnulus::round(double q, int N) {
  if (!(q > 0.0 && q <= 1.0))
    throw ValidationError("annulus", "modulus must lie in (0, 1]");
  FourierSeries id = FourierSeries::fromModes(N, {{1, cd(1.0, 0.0)}});
  FourierSeries inner = FourierSeries::fromModes(N, {{1, cd(q, 0.0)}});
  return NormalizedAnnulus(id, inner, 0.0);
}

NormalizedAnnulus NormalizedAnnulus::fromUnivalent(const FourierSeries& f) {
  double neg = 0.0;
  FourierSeries taylor = f.projectToModes(0, f.order(), &neg);
  const double norm = std::max(1.0, f.l2Norm());
  if (neg > 1e-8 * norm)
    throw ValidationError("annulus",
                          "map has anti-analytic content (l2 mass " +
                              std::to_string(neg) + ")");
  if (taylor.supOnGrid() > 1.0 + 1e-8)
    throw ValidationError("annulus", "map does not take the disc into itself");
  FourierSeries id = FourierSeries::fromModes(f.order(), {{1, cd(1.0, 0.0)}});
  return fromPair(id, taylor, neg);
}

NormalizedAnnulus NormalizedAnnulus::fromDiffeo(const CircleDiffeo& psi) {
  // The gluing identifies the outer copy's boundary point x with psi^{-1}(x)
  // on the inner copy, so the uniformizing pair is the welding of psi^{-1};
  // equivalently psi_plus = psi_minus o psi on the circle.
  const WeldingSolution w = weld(psi.inverse());
  return fromPair(w.f_minus, w.f_plus, w.residual);
}

NormalizedAnnulus NormalizedAnnulus::fromPair(const FourierSeries& psi_minus,
                                              const FourierSeries& psi_plus,
                                              double residual) {
  const int N = std::max(psi_minus.order(), psi_plus.order());
  FourierSeries bm = psi_minus.withOrder(N);
  FourierSeries bp = psi_plus.withOrder(N);

  // Exterior normalization: mode 1 exactly 1, mode 0 and analytic tail absent.
  const double bmScale = std::max(1.0, bm.l2Norm());
  if (std::abs(bm.coeff(1) - cd(1.0, 0.0)) > 1e-6 ||
      std::abs(bm.coeff(0)) > 1e-6 * bmScale)
    throw ValidationError("annulus", "outer map is not normalized");
  double tail = 0.0;
  bm = bm.projectToModes(-N, 1, &tail);
  if (tail > 1e-6 * bmScale)
    throw ValidationError("annulus",
                          "outer map carries analytic modes (l2 mass " +
                              std::to_string(tail) + ")");
  bm.setCoeff(0, cd(0.0, 0.0));
  bm.setCoeff(1, cd(1.0, 0.0));

  double hardy = 0.0;
  bp = bp.projectToModes(0, N, &hardy);
  if (hardy > 1e-6 * std::max(1.0, bp.l2Norm()))
    throw ValidationError("annulus", "inner map carries anti-analytic modes");

  checkDerivative(bp, {0.3, 0.6, 0.85, 1.0}, "inner");
  checkDerivative(bm, {1.0, 1.2, 1.6, 3.0}, "outer");

  // Boundary curves must be simple; constructing them runs the checks.
  const JordanCurve inner(bp);
  const JordanCurve outer(bm);

  // Disjoint interiors: inner-disc samples stay inside the outer curve and
  // exterior-side samples stay outside the inner curve (touching boundaries
  // are allowed, so only strictly interior radii are probed).
  const Eigen::VectorXd grid = thetaGrid(N);
  const Eigen::VectorXcd outerPts = outer.pointSamples();
  const Eigen::VectorXcd outerTg = outer.tangentSamples();
  const Eigen::VectorXcd innerPts = inner.pointSamples();
  const Eigen::VectorXcd innerTg = inner.tangentSamples();
  for (double r : {0.35, 0.7, 0.92}) {
    for (int j = 0; j < 2 * N + 1; j += 4) {
      const cd z = r * cd(std::cos(grid[j]), std::sin(grid[j]));
      const cd inside = bp.evalPoint(z);
      if (windingOfSamplesAbout(outerPts, outerTg, inside) != 1)
        throw ValidationError("annulus",
                              "inner disc escapes the outer boundary");
      const cd outside = bm.evalPoint(1.0 / z);
      if (windingOfSamplesAbout(innerPts, innerTg, outside) != 0)
        throw ValidationError("annulus",
                              "exterior side overlaps the inner disc");
    }
  }
  return NormalizedAnnulus(bm, bp, residual);
}

double NormalizedAnnulus::thinness() const {
  const Eigen::VectorXcd a = bp_.samples();
  const Eigen::VectorXcd b = bm_.samples();
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < a.size(); ++j)
    for (int k = 0; k < b.size(); ++k)
      best = std::min(best, std::abs(a[j] - b[k]));
  return best;
}

double NormalizedAnnulus::distanceTo(const NormalizedAnnulus& other) const {
  const int N = std::max(order(), other.order());
  double d = 0.0;
  for (int n = -N; n <= N; ++n) {
    d = std::max(d, std::abs(bm_.coeff(n) - other.bm_.coeff(n)));
    d = std::max(d, std::abs(bp_.coeff(n) - other.bp_.coeff(n)));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Semigroup composition
// ---------------------------------------------------------------------------
//
// Gluing data: the inner boundary of `a` is identified with the outer
// boundary of `b` through their parametrizations.  Uniformize:
//   E  = exterior map onto Ext(inner curve of a),
//   I  = interior map onto Int(outer curve of b) anchored at psi_plus^b(0);
// the transition  phi~ = (I^{-1} o psi_minus^b) o (psi_plus^a)^{-1} o E  is a
// circle diffeo assembled from the two boundary correspondences, its welding
// splits the glued sphere, and the new pair is read off through E and I with
// one affine renormalization applied to both components.

NormalizedAnnulus compose(const NormalizedAnnulus& a,
                          const NormalizedAnnulus& b) {
  const int N = std::max(a.order(), b.order());
  // The intermediate objects (boundary correspondences, resampled curve
  // compositions) carry spectral content well past the input band, so the
  // internal solves run with doubled headroom; the result is projected back
  // to the requested band at the end.
  const int Ni = 2 * N;
  const FourierSeries bmA = a.psiMinus().withOrder(Ni);
  const FourierSeries bpA = a.psiPlus().withOrder(Ni);
  const FourierSeries bmB = b.psiMinus().withOrder(Ni);
  const FourierSeries bpB = b.psiPlus().withOrder(Ni);

  const JordanCurve glueA(bpA);
  const RiemannMap E = riemannExterior(glueA);

  const JordanCurve glueB(bmB);
  const RiemannMap I = riemannInterior(glueB, bpB.coeff(0));

  // Both Riemann maps hand back their boundary correspondences, so the
  // transition diffeo needs no curve-point inversion.
  const CircleDiffeo trans =
      I.correspondence.inverse().composeWith(E.correspondence);
  const WeldingSolution W = weld(trans);

  // New outer map: F_minus o E^{-1} o psi_minus^a.
  const Eigen::VectorXcd xm = bmA.samples();
  double invm = 0.0;
  const Eigen::VectorXcd um = invertExteriorPoints(E.map, xm, &invm);
  Eigen::VectorXcd ym(um.size());
  for (int j = 0; j < um.size(); ++j) ym[j] = W.f_minus.evalPoint(um[j]);
  const FourierSeries rawm = FourierSeries::analyze(ym);

  const cd beta = rawm.coeff(0);
  const cd alpha = rawm.coeff(1);
  if (std::abs(alpha) < 1e-12)
    throw SolverError("compose", "degenerate renormalization");

  double tailm = 0.0;
  FourierSeries bmNew =
      ((rawm - FourierSeries::fromModes(0, {{0, beta}})) * (1.0 / alpha))
          .projectToModes(-N, 1, &tailm)
          .withOrder(N);

  // New inner map: F_plus o I^{-1} o psi_plus^b, same affine.
  const Eigen::VectorXcd xp = bpB.samples();
  double invp = 0.0;
  const Eigen::VectorXcd vp = invertInteriorPoints(I.map, xp, &invp);
  Eigen::VectorXcd yp(vp.size());
  for (int j = 0; j < vp.size(); ++j)
    yp[j] = (W.f_plus.evalPoint(vp[j]) - beta) / alpha;
  double tailp = 0.0;
  FourierSeries bpNew =
      FourierSeries::analyze(yp).projectToModes(0, N, &tailp).withOrder(N);

  const double residual = std::max(
      {W.residual, E.residual, I.residual, invm, invp, tailm, tailp});
  return NormalizedAnnulus::fromPair(bmNew, bpNew, residual);
}

// ---------------------------------------------------------------------------
// Involution
// ---------------------------------------------------------------------------

NormalizedAnnulus dagger(const NormalizedAnnulus& a) {
  const FourierSeries& bm = a.psiMinus();
  const FourierSeries& bp = a.psiPlus();
  const cd a0 = bp.coeff(0);
  const cd a1 = bp.coeff(1);
  const cd a2 = bp.coeff(2);
  if (std::abs(a1) < 1e-10)
    throw SolverError("dagger", "inner map has vanishing derivative at 0");

  // Reflection z -> conj(z^{-1}) swaps the two sides; the Mobius map
  //   M(w) = conj(a1)/(w - conj(a0)) + conj(a2)/conj(a1)
  // sends the reflected inner side back to an exterior map of the form
  // z + O(1/z), restoring the normalization in one stroke.
  const cd pole = std::conj(a0);
  const cd shift = std::conj(a2) / std::conj(a1);
  auto mobius = [&](cd w) { return std::conj(a1) / (w - pole) + shift; };

  const Eigen::VectorXcd bmS = bm.samples();
  const Eigen::VectorXcd bpS = bp.samples();
  const int n = (int)bmS.size();
  Eigen::VectorXcd newBm(n), newBp(n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(std::conj(bpS[j]) - pole) < 1e-9 ||
        std::abs(std::conj(bmS[j]) - pole) < 1e-9)
      throw SolverError("dagger", "reflection pole touches a boundary curve");
    newBm[j] = mobius(std::conj(bpS[j]));
    newBp[j] = mobius(std::conj(bmS[j]));
  }

  FourierSeries rawm = FourierSeries::analyze(newBm);
  const cd beta = rawm.coeff(0);
  const cd alpha = rawm.coeff(1);
  const int N = a.order();
  double tailm = 0.0, tailp = 0.0;
  FourierSeries bmNew =
      ((rawm - FourierSeries::fromModes(0, {{0, beta}})) * (1.0 / alpha))
          .projectToModes(-N, 1, &tailm);
  Eigen::VectorXcd adjP(n);
  for (int j = 0; j < n; ++j) adjP[j] = (newBp[j] - beta) / alpha;
  FourierSeries bpNew =
      FourierSeries::analyze(adjP).projectToModes(0, N, &tailp);

  return NormalizedAnnulus::fromPair(bmNew, bpNew,
                                     std::max({a.residual(), tailm, tailp}));
}

// ---------------------------------------------------------------------------
// Disc action and boundary-integral consistency
// ---------------------------------------------------------------------------

FourierSeries actOnDisc(const NormalizedAnnulus& a, const FourierSeries& u) {
  double neg = 0.0;
  FourierSeries disc = u.projectToModes(0, u.order(), &neg);
  if (neg > 1e-8 * std::max(1.0, u.l2Norm()))
    throw ValidationError("act", "disc map has anti-analytic content");
  if (disc.supOnGrid() > 1.0 + 1e-8)
    throw ValidationError("act", "disc map leaves the unit disc");
  JordanCurve boundary(disc);  // simplicity check of the disc boundary

  // The annulus fills its inner hole with the univalent map psi_plus; the
  // re-embedded disc is the composition psi_plus o u.
  const int N = std::max(a.order(), u.order());
  const Eigen::VectorXcd us = disc.withOrder(N).samples();
  Eigen::VectorXcd vs(us.size());
  for (int j = 0; j < us.size(); ++j) vs[j] = a.psiPlus().evalPoint(us[j]);
  double tail = 0.0;
  return FourierSeries::analyze(vs).projectToModes(0, N, &tail);
}

double cauchyConsistency(const NormalizedAnnulus& a,
                         const FourierSeries& omega) {
  auto contour = [&](const FourierSeries& side) {
    const Eigen::VectorXcd pts = side.samples();
    const Eigen::VectorXcd tg = side.derivativeTheta().samples();
    cd acc(0.0, 0.0);
    for (int j = 0; j < pts.size(); ++j) acc += omega.evalPoint(pts[j]) * tg[j];
    return acc * cd(2.0 * std::numbers::pi / (double)pts.size(), 0.0);
  };
  return std::abs(contour(a.psiMinus()) - contour(a.psiPlus()));
}

// ---------------------------------------------------------------------------
// Far-from-identity welding through the annulus semigroup
// ---------------------------------------------------------------------------

WeldingSolution weldFar(const CircleDiffeo& phi, int steps) {
  if (steps < 1)
    throw ValidationError("weld_far", "step count must be positive");
  const int N = phi.order();
  const FourierSeries& p = phi.displacement();

  NormalizedAnnulus chain = NormalizedAnnulus::identityElement(N);
  CircleDiffeo prev = CircleDiffeo::identity(N);
  double worst = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double s = (double)k / steps;
    CircleDiffeo cur = CircleDiffeo::fromDisplacement(p * cd(s, 0.0));
    const CircleDiffeo incr = cur.composeWith(prev.inverse());
    try {
      const WeldingSolution w = weld(incr);
      worst = std::max(worst, w.residual);
      const NormalizedAnnulus thin =
          NormalizedAnnulus::fromPair(w.f_minus, w.f_plus, w.residual);
      chain = (k == 1) ? thin : compose(chain, thin);
    } catch (const Error& e) {
      throw SolverError("weld_far",
                        "step " + std::to_string(k) + "/" +
                            std::to_string(steps) + " failed: " + e.what());
    }
    prev = cur;
  }

  WeldingSolution out{chain.psiPlus(), chain.psiMinus(), phi, 0.0, {}};
  out.residual = weldingMismatch(out.f_plus, out.f_minus, phi);
  out.diag.linearResidual = worst;
  return out;
}

}  // namespace annulib
