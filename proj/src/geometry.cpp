#include "annulib/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace annulib {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principalArg(cd z) { return std::atan2(z.imag(), z.real()); }
}  // namespace

// ---------------------------------------------------------------------------
// CircleDiffeo
// ---------------------------------------------------------------------------

CircleDiffeo CircleDiffeo::identity(int N) { return CircleDiffeo(FourierSeries(N)); }

CircleDiffeo CircleDiffeo::rotation(double alpha, int N) {
  FourierSeries p(N);
  p.setCoeff(0, cd(alpha, 0.0));
  return CircleDiffeo(p);
}

CircleDiffeo CircleDiffeo::fromDisplacement(const FourierSeries& p) {
  if (p.maxImagOnGrid() > 1e-9 * (1.0 + p.supOnGrid()))
    throw ValidationError("diffeo", "displacement is not real-valued");
  // Keep exactly the real part so downstream arithmetic sees a real function.
  FourierSeries pr = (p + p.conjugated()) * cd(0.5, 0.0);
  CircleDiffeo d(pr);
  const double m = d.minDerivative();
  if (m <= 0.0)
    throw ValidationError("diffeo",
                          "theta + p(theta) is not strictly increasing "
                          "(min derivative " + std::to_string(m) + ")");
  return d;
}

double CircleDiffeo::eval(double theta) const {
  return theta + p_.evalTheta(theta).real();
}

double CircleDiffeo::derivative(double theta) const {
  return 1.0 + p_.derivativeTheta().evalTheta(theta).real();
}

Eigen::VectorXd CircleDiffeo::gridImages() const {
  const Eigen::VectorXd g = thetaGrid(p_.order());
  const Eigen::VectorXcd ps = p_.samples();
  return g + ps.real();
}

Eigen::VectorXcd CircleDiffeo::circleImages() const {
  const Eigen::VectorXd phi = gridImages();
  Eigen::VectorXcd out(phi.size());
  for (int j = 0; j < phi.size(); ++j)
    out[j] = cd(std::cos(phi[j]), std::sin(phi[j]));
  return out;
}

CircleDiffeo CircleDiffeo::inverse() const {
  const int N = p_.order();
  const int n = 2 * N + 1;
  const Eigen::VectorXd grid = thetaGrid(N);
  const FourierSeries dp = p_.derivativeTheta();
  Eigen::VectorXcd q(n);
  for (int j = 0; j < n; ++j) {
    // Solve x + p(x) = theta_j by Newton; the displacement of the inverse at
    // theta_j is x - theta_j.
    const double target = grid[j];
    double x = target - p_.evalTheta(target).real();  // first-order guess
    bool done = false;
    for (int it = 0; it < 60; ++it) {
      const double f = x + p_.evalTheta(x).real() - target;
      const double df = 1.0 + dp.evalTheta(x).real();
      const double step = f / df;
      x -= step;
      if (std::abs(step) < 1e-14) {
        done = true;
        break;
      }
    }
    if (!done)
      throw SolverError("diffeo", "inverse iteration did not converge");
    q[j] = cd(x - target, 0.0);
  }
  return CircleDiffeo(FourierSeries::analyze(q));
}

CircleDiffeo CircleDiffeo::composeWith(const CircleDiffeo& inner) const {
  const int N = std::max(order(), inner.order());
  const Eigen::VectorXd grid = thetaGrid(N);
  const Eigen::VectorXd mid = inner.withOrder(N).gridImages();
  Eigen::VectorXcd q(2 * N + 1);
  for (int j = 0; j < 2 * N + 1; ++j)
    q[j] = cd(mid[j] + p_.evalTheta(mid[j]).real() - grid[j], 0.0);
  return CircleDiffeo(FourierSeries::analyze(q));
}

CircleDiffeo CircleDiffeo::withOrder(int N) const {
  return CircleDiffeo(p_.withOrder(N));
}

double CircleDiffeo::minDerivative() const {
  // Oversample 4x so monotonicity is probed between collocation nodes too.
  const int M = 4 * p_.order() + 2;
  const Eigen::VectorXcd d = p_.derivativeTheta().withOrder(M).samples();
  return 1.0 + d.real().minCoeff();
}

double CircleDiffeo::distanceTo(const CircleDiffeo& other) const {
  const int M = 2 * std::max(order(), other.order()) + 1;
  const Eigen::VectorXd grid = thetaGrid(M);
  double sup = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    double d = eval(grid[j]) - other.eval(grid[j]);
    // Displacements are 2 pi periodic lifts; compare modulo full turns.
    d = std::remainder(d, kTwoPi);
    sup = std::max(sup, std::abs(d));
  }
  return sup;
}

// ---------------------------------------------------------------------------
// JordanCurve
// ---------------------------------------------------------------------------

JordanCurve::JordanCurve(FourierSeries gamma)
    : g_(std::move(gamma)), dg_(g_.derivativeTheta().withOrder(g_.order())) {
  const double tmax = maxTangentNorm();
  if (tmax == 0.0) throw ValidationError("curve", "constant parametrization");
  if (minTangentNorm() < 1e-9 * tmax)
    throw ValidationError("curve", "tangent vanishes on the grid");
  if (injectivityRatio() < 1e-6)
    throw ValidationError("curve", "parametrization fails the simplicity check");
}

int JordanCurve::windingAbout(cd p) const {
  const Eigen::VectorXcd w = pointSamples();
  const Eigen::VectorXcd t = tangentSamples();
  cd acc(0.0, 0.0);
  for (int j = 0; j < w.size(); ++j) acc += t[j] / (w[j] - p);
  const double wind = (acc * kTwoPi / (double)w.size() / cd(0.0, kTwoPi)).real();
  return (int)std::lround(wind);
}

cd JordanCurve::interiorPoint() const {
  const Eigen::VectorXcd w = pointSamples();
  const cd centroid = w.mean();
  const double scale = (w.array() - centroid).abs().maxCoeff();
  auto clearance = [&](cd p) {
    return (w.array() - p).abs().minCoeff();
  };
  if (clearance(centroid) > 1e-3 * scale && windingAbout(centroid) == 1)
    return centroid;
  // Probe inward normals (interior lies to the left of the tangent).
  const Eigen::VectorXcd t = tangentSamples();
  const int n = (int)w.size();
  for (double frac : {0.3, 0.15, 0.075, 0.45}) {
    for (int j : {0, n / 4, n / 2, (3 * n) / 4}) {
      const cd nrm = cd(0.0, 1.0) * t[j] / std::abs(t[j]);
      const cd cand = w[j] + frac * scale * nrm;
      if (clearance(cand) > 0.3 * frac * scale && windingAbout(cand) == 1)
        return cand;
    }
  }
  throw SolverError("curve", "failed to locate an interior point");
}

double JordanCurve::injectivityRatio() const {
  const Eigen::VectorXcd w = pointSamples();
  const int n = (int)w.size();
  const double scale = maxTangentNorm();
  double ratio = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double chord =
          std::abs(cd(std::cos(kTwoPi * j / n), std::sin(kTwoPi * j / n)) -
                   cd(std::cos(kTwoPi * k / n), std::sin(kTwoPi * k / n)));
      ratio = std::min(ratio, std::abs(w[j] - w[k]) / (chord * scale));
    }
  }
  return ratio;
}

double JordanCurve::minTangentNorm() const {
  return tangentSamples().cwiseAbs().minCoeff();
}

double JordanCurve::maxTangentNorm() const {
  return tangentSamples().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Riemann maps via the Kerzman-Stein equation
// ---------------------------------------------------------------------------
//
// With Cauchy kernel H(z,w) = (1/2 pi i) T(w)/(w-z) (T = unit tangent) the
// Kerzman-Stein kernel
//     A(z,w) = conj(H(w,z)) - H(z,w)
// is smooth and skew-hermitian (it vanishes identically for a circle), and
// the boundary Szego values S solve
//     (I + A) S = g,    g(z) = conj( (1/2 pi i) T(z)/(z - a) )
// in L2(|dw|).  The forward map F : Omega -> D with F(a) = 0, F'(a) > 0 has
// unimodular boundary values F = S^2 T / (i |S|^2); inverting its lifted
// boundary phase resamples gamma onto the equispaced phase grid and yields
// the Taylor coefficients of the inverse map D -> Omega.

namespace {

struct PhaseSolve {
  Eigen::VectorXd phase;      // lifted arg F(gamma(theta_j))
  double unimodularDefect;
  double linearResidual;
};

PhaseSolve kerzmanSteinPhase(const JordanCurve& curve, cd anchor) {
  const int n = curve.series().gridSize();
  const Eigen::VectorXcd w = curve.pointSamples();
  const Eigen::VectorXcd tg = curve.tangentSamples();
  const double dtheta = kTwoPi / n;

  Eigen::VectorXcd T(n), wt(n);
  for (int j = 0; j < n; ++j) {
    T[j] = tg[j] / std::abs(tg[j]);
    wt[j] = std::abs(tg[j]) * dtheta;  // |dw| weights
  }

  const cd itwopi = cd(0.0, kTwoPi);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;  // kernel extends by zero on the diagonal
      const cd H_jk = T[k] / (w[k] - w[j]) / itwopi;
      const cd H_kj = T[j] / (w[j] - w[k]) / itwopi;
      B(j, k) = (std::conj(H_kj) - H_jk) * wt[k];
    }
  }

  Eigen::VectorXcd rhs(n);
  for (int j = 0; j < n; ++j)
    rhs[j] = std::conj(T[j] / (w[j] - anchor) / itwopi);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
  const Eigen::VectorXcd S = lu.solve(rhs);
  const double linres = (B * S - rhs).cwiseAbs().maxCoeff() /
                        rhs.cwiseAbs().maxCoeff();
  if (linres > 1e-8)
    throw SolverError("riemann", "Szego system solve failed (residual " +
                                     std::to_string(linres) + ")");

  PhaseSolve out;
  out.linearResidual = linres;
  out.unimodularDefect = 0.0;
  Eigen::VectorXcd F(n);
  for (int j = 0; j < n; ++j) {
    const double s2 = std::norm(S[j]);
    if (s2 == 0.0) throw SolverError("riemann", "Szego values vanished");
    F[j] = S[j] * S[j] * T[j] / (cd(0.0, 1.0) * s2);
    out.unimodularDefect =
        std::max(out.unimodularDefect, std::abs(std::abs(F[j]) - 1.0));
  }

  // Continuous lift of arg F along the closed parametrization.
  out.phase.resize(n);
  out.phase[0] = principalArg(F[0]);
  for (int j = 1; j < n; ++j)
    out.phase[j] = out.phase[j - 1] + principalArg(F[j] / F[j - 1]);
  const double total =
      out.phase[n - 1] + principalArg(F[0] / F[n - 1]) - out.phase[0];
  if (std::abs(total - kTwoPi) > 1e-6)
    throw SolverError("riemann", "boundary phase winds " +
                                     std::to_string(total / kTwoPi) +
                                     " times, expected 1");
  return out;
}

}  // namespace

RiemannMap riemannInterior(const JordanCurve& curve, cd anchor, double tol) {
  if (curve.windingAbout(anchor) != 1)
    throw ValidationError("riemann", "anchor is not inside the curve");

  const int N = curve.order();
  const int n = 2 * N + 1;
  const PhaseSolve ps = kerzmanSteinPhase(curve, anchor);

  // Boundary correspondence: phase(theta) is an increasing circle diffeo.
  const Eigen::VectorXd grid = thetaGrid(N);
  Eigen::VectorXcd disp(n);
  for (int j = 0; j < n; ++j) disp[j] = cd(ps.phase[j] - grid[j], 0.0);
  CircleDiffeo phaseMap = CircleDiffeo::identity(N);
  try {
    phaseMap = CircleDiffeo::fromDisplacement(FourierSeries::analyze(disp));
  } catch (const ValidationError& e) {
    throw SolverError("riemann",
                      std::string("boundary phase is not monotone: ") + e.what());
  }
  const CircleDiffeo correspondence = phaseMap.inverse();

  // Sample the inverse map on the equispaced phase grid.
  const Eigen::VectorXd t = correspondence.gridImages();
  Eigen::VectorXcd G(n);
  for (int j = 0; j < n; ++j) G[j] = curve.point(t[j]);
  const FourierSeries raw = FourierSeries::analyze(G);

  double offSupport = 0.0;
  FourierSeries taylor = raw.projectToModes(0, N, &offSupport);

  RiemannMap out{taylor, correspondence, 0.0};
  const double anchorDefect = std::abs(taylor.coeff(0) - anchor);
  const double rotationDefect =
      std::abs(taylor.coeff(1)) > 0 ? std::abs(principalArg(taylor.coeff(1))) : 1.0;
  out.residual = std::max({offSupport, anchorDefect, rotationDefect,
                           ps.unimodularDefect, ps.linearResidual});
  if (out.residual > tol)
    throw SolverError("riemann", "interior map residual " +
                                     std::to_string(out.residual) +
                                     " exceeds tolerance");
  return out;
}

RiemannMap riemannExterior(const JordanCurve& curve, double tol) {
  const int N = curve.order();
  const int n = 2 * N + 1;
  const cd p = curve.interiorPoint();

  // Reflect the exterior through w -> 1/(w - p); reversing the parameter
  // restores positive orientation for the image curve.
  const Eigen::VectorXcd w = curve.pointSamples();
  Eigen::VectorXcd refl(n);
  for (int j = 0; j < n; ++j) refl[j] = 1.0 / (w[(n - j) % n] - p);
  const JordanCurve reflected{FourierSeries::analyze(refl)};

  const RiemannMap inner = riemannInterior(reflected, cd(0.0, 0.0), tol);

  // Undo the reflection: E(z) = p + 1/G*(1/z) on |z| = 1.
  const Eigen::VectorXcd gstar = inner.map.samples();
  Eigen::VectorXcd E(n);
  for (int j = 0; j < n; ++j) E[j] = p + 1.0 / gstar[(n - j) % n];
  const FourierSeries raw = FourierSeries::analyze(E);

  double offSupport = 0.0;
  FourierSeries laurent = raw.projectToModes(-N, 1, &offSupport);

  // Boundary correspondence: E(e^{iu}) = gamma(-t*(-u)).
  const int Nc = inner.correspondence.order();
  const Eigen::VectorXd qgrid = thetaGrid(Nc);
  const Eigen::VectorXd tstar = inner.correspondence.gridImages();
  const int m = 2 * Nc + 1;
  Eigen::VectorXcd disp(m);
  for (int j = 0; j < m; ++j) {
    const int k = (m - j) % m;
    disp[j] = cd(-(tstar[k] - qgrid[k]), 0.0);
  }
  const CircleDiffeo correspondence =
      CircleDiffeo::fromDisplacement(FourierSeries::analyze(disp));

  RiemannMap out{laurent, correspondence, 0.0};
  const cd c1 = laurent.coeff(1);
  const double rotationDefect =
      std::abs(c1) > 0 ? std::abs(principalArg(c1)) : 1.0;
  out.residual = std::max({inner.residual, offSupport, rotationDefect});
  if (out.residual > tol)
    throw SolverError("riemann", "exterior map residual " +
                                     std::to_string(out.residual) +
                                     " exceeds tolerance");
  return out;
}

}  // namespace annulib
