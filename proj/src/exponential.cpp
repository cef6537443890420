#include "annulib/exponential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace annulib {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 4-point Lagrange interpolation of the columns of C (uniform time grid over
// [0, t0]) at an arbitrary time; degrades gracefully for M < 4.
Eigen::VectorXcd lagrangeColumns(const Eigen::MatrixXcd& C, double t0,
                                 double tau) {
  const int M = (int)C.cols();
  const double dt = t0 / (M - 1);
  const int p = std::min(4, M);
  int k0 = (int)std::floor(tau / dt) - 1;
  k0 = std::clamp(k0, 0, M - p);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(C.rows());
  for (int m = 0; m < p; ++m) {
    double w = 1.0;
    const double tm = (k0 + m) * dt;
    for (int l = 0; l < p; ++l) {
      if (l == m) continue;
      const double tl = (k0 + l) * dt;
      w *= (tau - tl) / (tm - tl);
    }
    out += w * C.col(k0 + m);
  }
  return out;
}

// Fourth-order finite difference in time along each row; needs M >= 5.
Eigen::MatrixXcd timeDerivative(const Eigen::MatrixXcd& f, double t0) {
  const int M = (int)f.cols();
  if (M < 5)
    throw ValidationError("framing",
                          "time derivative needs at least 5 time nodes");
  const double h = t0 / (M - 1);
  Eigen::MatrixXcd d(f.rows(), M);
  d.col(0) = (-25.0 * f.col(0) + 48.0 * f.col(1) - 36.0 * f.col(2) +
              16.0 * f.col(3) - 3.0 * f.col(4)) /
             (12.0 * h);
  d.col(1) = (-3.0 * f.col(0) - 10.0 * f.col(1) + 18.0 * f.col(2) -
              6.0 * f.col(3) + f.col(4)) /
             (12.0 * h);
  for (int k = 2; k <= M - 3; ++k)
    d.col(k) = (f.col(k - 2) - 8.0 * f.col(k - 1) + 8.0 * f.col(k + 1) -
                f.col(k + 2)) /
               (12.0 * h);
  d.col(M - 2) = (3.0 * f.col(M - 1) + 10.0 * f.col(M - 2) -
                  18.0 * f.col(M - 3) + 6.0 * f.col(M - 4) - f.col(M - 5)) /
                 (12.0 * h);
  d.col(M - 1) = (25.0 * f.col(M - 1) - 48.0 * f.col(M - 2) +
                  36.0 * f.col(M - 3) - 16.0 * f.col(M - 4) +
                  3.0 * f.col(M - 5)) /
                 (12.0 * h);
  return d;
}

// Spectral derivative in theta along each column.
Eigen::MatrixXcd thetaDerivative(const Eigen::MatrixXcd& f) {
  Eigen::MatrixXcd d(f.rows(), f.cols());
  for (int k = 0; k < f.cols(); ++k)
    d.col(k) = FourierSeries::analyze(f.col(k)).derivativeTheta().samples();
  return d;
}

int windingOfSamplesAbout(const Eigen::VectorXcd& pts,
                          const Eigen::VectorXcd& tangents, cd p) {
  cd acc(0.0, 0.0);
  for (int j = 0; j < pts.size(); ++j) acc += tangents[j] / (pts[j] - p);
  return (int)std::lround((acc / cd(0.0, (double)pts.size())).real());
}

}  // namespace

// ---------------------------------------------------------------------------
// LiePath
// ---------------------------------------------------------------------------

LiePath::LiePath(int N, int M, double t0, Eigen::MatrixXcd samples)
    : N_(N), M_(M), t0_(t0), X_(std::move(samples)) {
  if (N < 1) throw ValidationError("path", "mode order must be positive");
  if (M < 2) throw ValidationError("path", "need at least 2 time nodes");
  if (!(t0 > 0.0)) throw ValidationError("path", "horizon must be positive");
  if (X_.rows() != 2 * N + 1 || X_.cols() != M)
    throw ValidationError("path", "sample matrix does not match the grid");
  if (!X_.allFinite())
    throw ValidationError("path", "sample matrix has non-finite entries");
}

LiePath LiePath::constant(const FourierSeries& field, int M, double t0) {
  Eigen::MatrixXcd X(field.gridSize(), M);
  const Eigen::VectorXcd s = field.samples();
  for (int k = 0; k < M; ++k) X.col(k) = s;
  return LiePath(field.order(), M, t0, std::move(X));
}

FourierSeries LiePath::slice(int k) const {
  if (k < 0 || k >= M_) throw ValidationError("path", "time index out of range");
  return FourierSeries::analyze(X_.col(k));
}

double LiePath::coneDefect() const {
  double worst = 0.0;
  for (int k = 0; k < M_; ++k)
    for (int j = 0; j < X_.rows(); ++j)
      worst = std::max(worst, -X_(j, k).imag());
  return worst;
}

bool LiePath::discType(double tol) const {
  double bad = 0.0, total = 0.0;
  for (int k = 0; k < M_; ++k) {
    const FourierSeries s = slice(k);
    for (int n = -N_; n <= N_; ++n) {
      const double a2 = std::norm(s.coeff(n));
      total += a2;
      if (n <= -2) bad += a2;
    }
  }
  return std::sqrt(bad) <= tol * (1.0 + std::sqrt(total));
}

bool LiePath::hasSittingInstants(double tol) const {
  const double bound = tol * (1.0 + supNorm());
  for (int k = 0; k < M_; ++k) {
    const double t = t0_ * k / (M_ - 1);
    if (t <= 0.05 * t0_ + 1e-15 || t >= 0.95 * t0_ - 1e-15) {
      if (X_.col(k).cwiseAbs().maxCoeff() > bound) return false;
    }
  }
  return true;
}

double LiePath::supNorm() const { return X_.cwiseAbs().maxCoeff(); }

FourierSeries Framing::column(int k) const {
  if (k < 0 || k >= M)
    throw ValidationError("framing", "time index out of range");
  return FourierSeries::analyze(h.col(k));
}

// ---------------------------------------------------------------------------
// Time-ordered exponential
// ---------------------------------------------------------------------------

namespace {

// Y(z, t) = i z X~(z, t) for a disc-type field: with Fourier coefficients
// c_{-1}..c_N of the slice, Y = i (c_{-1} + c_0 z + c_1 z^2 + ...).
cd flowField(const Eigen::VectorXcd& coeffs, int N, cd z) {
  cd acc(0.0, 0.0);
  for (int n = N; n >= -1; --n) acc = acc * z + coeffs[n + N];
  return cd(0.0, 1.0) * acc;
}

struct PassResult {
  Eigen::MatrixXcd h;
  FourierSeries inner;
  double tail;

  PassResult() : inner(FourierSeries::fromModes(1, {})), tail(0.0) {}
};

PassResult runPass(const Eigen::MatrixXcd& coeffCols, int N, int M, double t0,
                   int substeps) {
  const int n = 2 * N + 1;
  const double dt = t0 / (M - 1);
  const Eigen::VectorXd grid = thetaGrid(N);
  Eigen::VectorXcd circle(n);
  for (int j = 0; j < n; ++j)
    circle[j] = cd(std::cos(grid[j]), std::sin(grid[j]));

  PassResult out;
  out.h.resize(n, M);
  out.h.col(M - 1) = circle;
  FourierSeries w = FourierSeries::fromModes(N, {{1, cd(1.0, 0.0)}});

  for (int k = M - 2; k >= 0; --k) {
    Eigen::VectorXcd pts = circle;
    const double delta = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
      const double tau = k * dt + s * delta;
      const Eigen::VectorXcd c1 = lagrangeColumns(coeffCols, t0, tau);
      const Eigen::VectorXcd c2 =
          lagrangeColumns(coeffCols, t0, tau + 0.5 * delta);
      const Eigen::VectorXcd c3 = lagrangeColumns(coeffCols, t0, tau + delta);
      for (int j = 0; j < n; ++j) {
        const cd p = pts[j];
        const cd k1 = flowField(c1, N, p);
        const cd k2 = flowField(c2, N, p + 0.5 * delta * k1);
        const cd k3 = flowField(c2, N, p + 0.5 * delta * k2);
        const cd k4 = flowField(c3, N, p + delta * k3);
        pts[j] = p + (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    for (int j = 0; j < n; ++j) {
      // Genuine cone violations push characteristics outward at a rate of
      // order ||Im X|| and blow through this bound within a step or two;
      // cubic time-interpolation of a valid field can only produce transient
      // excursions at the interpolation-error scale, well below it.
      if (!std::isfinite(pts[j].real()) || !std::isfinite(pts[j].imag()) ||
          std::abs(pts[j]) > 1.0 + 1e-5)
        throw SolverError("exp", "characteristic escaped the closed disc");
      pts[j] = w.evalPoint(pts[j]);
    }
    out.h.col(k) = pts;
    double tail = 0.0;
    w = FourierSeries::analyze(pts).projectToModes(0, N, &tail);
    out.tail = std::max(out.tail, tail);
  }
  out.inner = w;
  return out;
}

}  // namespace

ExpResult expUniv(const LiePath& path, double tol) {
  if (path.coneDefect() > 1e-10 * (1.0 + path.supNorm()))
    throw ValidationError("exp",
                          "field leaves the generating cone (Im X < 0)");
  if (!path.discType(1e-10))
    throw ValidationError(
        "exp", "field has modes below -1 and does not extend to the disc");

  const int N = path.order();
  const int M = path.timeNodes();
  Eigen::MatrixXcd coeffCols(2 * N + 1, M);
  for (int k = 0; k < M; ++k) {
    const FourierSeries s = path.slice(k);
    for (int n = -N; n <= N; ++n) coeffCols(n + N, k) = s.coeff(n);
  }

  PassResult accepted;
  double diff = std::numeric_limits<double>::infinity();
  int used = 1;
  PassResult prev;
  bool havePrev = false;
  for (int subs : {1, 2, 4, 8}) {
    PassResult cur = runPass(coeffCols, N, M, path.horizon(), subs);
    if (havePrev)
      diff = (cur.h.col(0) - prev.h.col(0)).cwiseAbs().maxCoeff();
    accepted = cur;
    used = subs;
    if (havePrev && diff < tol) break;
    prev = std::move(cur);
    havePrev = true;
  }
  if (!(diff < 1e-4))
    throw SolverError("exp", "flow did not converge under substep refinement");

  NormalizedAnnulus ann = NormalizedAnnulus::fromUnivalent(accepted.inner);
  Framing fr{N, M, path.horizon(), accepted.h, ann};
  const double residual = std::max(diff, accepted.tail);
  return ExpResult{ann, fr, residual, used};
}

// ---------------------------------------------------------------------------
// Framing diagnostics
// ---------------------------------------------------------------------------

LiePath pathFromFraming(const Framing& fr) {
  const Eigen::MatrixXcd ht = timeDerivative(fr.h, fr.t0);
  const Eigen::MatrixXcd hq = thetaDerivative(fr.h);

  const double hqMax = hq.cwiseAbs().maxCoeff();
  if (hq.cwiseAbs().minCoeff() < 1e-9 * hqMax)
    throw SolverError("framing", "angular derivative of the framing vanishes");

  // Orientation: the evolution must sweep the annulus without folding, i.e.
  // the Jacobian Im(conj(h_t) h_theta) stays non-negative.
  const double jScale = 1.0 + ht.cwiseAbs().maxCoeff() * hqMax;
  Eigen::MatrixXcd X(fr.h.rows(), fr.M);
  for (int k = 0; k < fr.M; ++k)
    for (int j = 0; j < fr.h.rows(); ++j) {
      const double jac = (std::conj(ht(j, k)) * hq(j, k)).imag();
      if (jac < -1e-10 * jScale)
        throw ValidationError("framing", "evolution reverses orientation");
      X(j, k) = -ht(j, k) / hq(j, k);
    }
  return LiePath(fr.N, fr.M, fr.t0, std::move(X));
}

double transportResidual(const Eigen::MatrixXcd& f, const LiePath& path) {
  if (f.rows() != 2 * path.order() + 1 || f.cols() != path.timeNodes())
    throw ValidationError("framing", "field grid does not match the path");
  const Eigen::MatrixXcd ft = timeDerivative(f, path.horizon());
  const Eigen::MatrixXcd fq = thetaDerivative(f);
  return (ft + path.samples().cwiseProduct(fq)).cwiseAbs().maxCoeff();
}

double xholoResidual(const Framing& fr, const LiePath& path) {
  if (fr.N != path.order() || fr.M != path.timeNodes() ||
      std::abs(fr.t0 - path.horizon()) > 1e-12 * (1.0 + fr.t0))
    throw ValidationError("framing", "framing grid does not match the path");
  return transportResidual(fr.h, path);
}

cd cauchyReconstruct(const Framing& fr, const FourierSeries& gOut,
                     const FourierSeries& gIn, cd z) {
  const int n = (int)fr.h.rows();
  const Eigen::VectorXcd outPts = fr.h.col(fr.M - 1);
  const Eigen::VectorXcd inPts = fr.h.col(0);
  const Eigen::VectorXcd outTg =
      FourierSeries::analyze(outPts).derivativeTheta().samples();
  const Eigen::VectorXcd inTg =
      FourierSeries::analyze(inPts).derivativeTheta().samples();

  if (windingOfSamplesAbout(outPts, outTg, z) != 1 ||
      windingOfSamplesAbout(inPts, inTg, z) != 0)
    throw ValidationError("cauchy",
                          "evaluation point is not inside the annulus");
  const double step = kTwoPi / n;
  for (const auto* side : {&outPts, &inPts}) {
    const auto& tg = (side == &outPts) ? outTg : inTg;
    const double reach = step * tg.cwiseAbs().maxCoeff();
    if (((*side).array() - z).cwiseAbs().minCoeff() < reach)
      throw ValidationError("cauchy",
                            "evaluation point too close to a boundary");
  }

  auto contour = [&](const Eigen::VectorXcd& pts, const Eigen::VectorXcd& tg,
                     const FourierSeries& g) {
    cd acc(0.0, 0.0);
    for (int j = 0; j < n; ++j)
      acc += g.evalPoint(pts[j]) / (pts[j] - z) * tg[j];
    return acc * (step / cd(0.0, kTwoPi));
  };
  return contour(outPts, outTg, gOut) - contour(inPts, inTg, gIn);
}

Eigen::MatrixXcd beltrami(const LiePath& path) {
  const Eigen::MatrixXcd& X = path.samples();
  Eigen::MatrixXcd mu(X.rows(), X.cols());
  const cd i(0.0, 1.0);
  for (int k = 0; k < X.cols(); ++k)
    for (int j = 0; j < X.rows(); ++j) {
      if (std::abs(X(j, k) + i) < 1e-12)
        throw SolverError("beltrami", "field attains -i");
      mu(j, k) = (X(j, k) - i) / (X(j, k) + i);
    }
  return mu;
}

// ---------------------------------------------------------------------------
// Path surgery
// ---------------------------------------------------------------------------

LiePath concat(const LiePath& a, const LiePath& b) {
  if (!a.hasSittingInstants(1e-7) || !b.hasSittingInstants(1e-7))
    throw ValidationError("concat", "paths must sit at their endpoints");
  if (std::abs(a.dt() - b.dt()) > 1e-9 * std::max(a.dt(), b.dt()))
    throw ValidationError("concat",
                          "time steps differ; resample before concatenating");

  const int N = std::max(a.order(), b.order());
  auto lift = [N](const LiePath& p) {
    Eigen::MatrixXcd X(2 * N + 1, p.timeNodes());
    for (int k = 0; k < p.timeNodes(); ++k)
      X.col(k) = p.slice(k).withOrder(N).samples();
    return X;
  };
  const Eigen::MatrixXcd XA = lift(a);
  const Eigen::MatrixXcd XB = lift(b);

  const int M = a.timeNodes() + b.timeNodes() - 1;
  Eigen::MatrixXcd X(2 * N + 1, M);
  X.leftCols(b.timeNodes() - 1) = XB.leftCols(b.timeNodes() - 1);
  X.col(b.timeNodes() - 1) =
      0.5 * (XB.col(b.timeNodes() - 1) + XA.col(0));
  X.rightCols(a.timeNodes() - 1) = XA.rightCols(a.timeNodes() - 1);
  return LiePath(N, M, a.horizon() + b.horizon(), std::move(X));
}

LiePath makeSittingInstants(const LiePath& path, int newM) {
  const int M = newM > 0 ? newM : path.timeNodes();
  if (M < 2) throw ValidationError("path", "need at least 2 time nodes");
  const double t0 = path.horizon();

  auto sigma = [](double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
  auto dsigma = [](double y) {
    return y > 0.0 ? std::exp(-1.0 / y) / (y * y) : 0.0;
  };

  Eigen::MatrixXcd X(path.samples().rows(), M);
  for (int k = 0; k < M; ++k) {
    const double t = t0 * k / (M - 1);
    const double x = (t / t0 - 0.05) / 0.9;
    if (x <= 0.0 || x >= 1.0) {
      X.col(k).setZero();
      continue;
    }
    const double u = sigma(x), v = sigma(1.0 - x);
    const double tau = t0 * u / (u + v);
    const double dS = (dsigma(x) * v + u * dsigma(1.0 - x)) /
                      ((u + v) * (u + v));
    X.col(k) = lagrangeColumns(path.samples(), t0,
                               std::clamp(tau, 0.0, t0)) *
               (dS / 0.9);
  }
  return LiePath(path.order(), M, t0, std::move(X));
}

LiePath resampleTime(const LiePath& path, int M) {
  if (M < 2) throw ValidationError("path", "need at least 2 time nodes");
  const double t0 = path.horizon();
  Eigen::MatrixXcd X(path.samples().rows(), M);
  for (int k = 0; k < M; ++k)
    X.col(k) = lagrangeColumns(path.samples(), t0, t0 * k / (M - 1));
  return LiePath(path.order(), M, t0, std::move(X));
}

double pullbackFieldResidual(const Framing& fr, const LiePath& path,
                             const FourierSeries& v) {
  if (fr.N != path.order() || fr.M != path.timeNodes())
    throw ValidationError("framing", "framing grid does not match the path");
  const Eigen::MatrixXcd hq = thetaDerivative(fr.h);
  if (hq.cwiseAbs().minCoeff() < 1e-9 * hq.cwiseAbs().maxCoeff())
    throw SolverError("framing", "angular derivative of the framing vanishes");

  Eigen::MatrixXcd f(fr.h.rows(), fr.M);
  for (int k = 0; k < fr.M; ++k)
    for (int j = 0; j < fr.h.rows(); ++j)
      f(j, k) = v.evalPoint(fr.h(j, k)) / hq(j, k);

  const Eigen::MatrixXcd ft = timeDerivative(f, fr.t0);
  const Eigen::MatrixXcd fq = thetaDerivative(f);
  const Eigen::MatrixXcd Xq = thetaDerivative(path.samples());
  const Eigen::MatrixXcd lie =
      Xq.cwiseProduct(f) - path.samples().cwiseProduct(fq);
  return (ft - lie).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Thin loops
// ---------------------------------------------------------------------------

int windingThinLoop(const LiePath& path) {
  const double scale = 1.0 + path.supNorm();
  double maxIm = 0.0;
  for (int k = 0; k < path.timeNodes(); ++k)
    maxIm = std::max(maxIm, path.samples().col(k).imag().cwiseAbs().maxCoeff());
  if (maxIm > 1e-9 * scale)
    throw ValidationError("winding", "path is not thin (field is not real)");

  std::vector<FourierSeries> slices;
  slices.reserve(path.timeNodes());
  for (int k = 0; k < path.timeNodes(); ++k) slices.push_back(path.slice(k));

  const int M = path.timeNodes();
  const double t0 = path.horizon();
  const double dt = t0 / (M - 1);
  auto value = [&](double theta, double tau) {
    const int p = std::min(4, M);
    int k0 = std::clamp((int)std::floor(tau / dt) - 1, 0, M - p);
    double val = 0.0;
    for (int m = 0; m < p; ++m) {
      double w = 1.0;
      const double tm = (k0 + m) * dt;
      for (int l = 0; l < p; ++l) {
        if (l == m) continue;
        w *= (tau - (k0 + l) * dt) / (tm - (k0 + l) * dt);
      }
      val += w * slices[k0 + m].evalTheta(theta).real();
    }
    return val;
  };

  const int steps = std::max(512, 8 * (M - 1));
  const double delta = t0 / steps;
  int degree = 0;
  for (int s = 0; s < 8; ++s) {
    double th = kTwoPi * s / 8.0;
    const double th0 = th;
    for (int q = 0; q < steps; ++q) {
      const double tau = q * delta;
      const double k1 = value(th, tau);
      const double k2 = value(th + 0.5 * delta * k1, tau + 0.5 * delta);
      const double k3 = value(th + 0.5 * delta * k2, tau + 0.5 * delta);
      const double k4 = value(th + delta * k3, tau + delta);
      th += (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double turn = (th - th0) / kTwoPi;
    const int d = (int)std::lround(turn);
    // The turn count must be unambiguous: a trajectory ending more than a
    // tenth of a turn away from a whole number of turns is not a loop.
    if (std::abs(turn - d) > 0.1)
      throw ValidationError("winding",
                            "time-t0 flow does not return to the identity");
    if (s == 0)
      degree = d;
    else if (d != degree)
      throw ValidationError("winding",
                            "starting points disagree on the turn count");
  }
  return degree;
}

}  // namespace annulib
