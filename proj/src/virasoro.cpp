#include "annulib/virasoro.hpp"

#include <algorithm>
#include <cmath>

namespace annulib {

namespace {

// 4-point Lagrange interpolation of matrix columns on a uniform grid over
// [0, t0]; exact at the nodes.
Eigen::VectorXcd lagrangeCol(const Eigen::MatrixXcd& C, double t0,
                             double tau) {
  const int M = (int)C.cols();
  const double dt = t0 / (M - 1);
  const int p = std::min(4, M);
  int k0 = std::clamp((int)std::floor(tau / dt) - 1, 0, M - p);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(C.rows());
  for (int m = 0; m < p; ++m) {
    double w = 1.0;
    for (int l = 0; l < p; ++l) {
      if (l == m) continue;
      w *= (tau - (k0 + l) * dt) / ((k0 + m) * dt - (k0 + l) * dt);
    }
    out += w * C.col(k0 + m);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cocycle arithmetic
// ---------------------------------------------------------------------------

cd cocycle(const FourierSeries& f, const FourierSeries& g) {
  const int lo = std::max(-f.order(), 2 - g.order());
  const int hi = std::min(f.order(), 2 + g.order());
  cd acc(0.0, 0.0);
  for (int k = lo; k <= hi; ++k) {
    const double w = (double)k * (k - 1) * (k - 2);
    if (w == 0.0) continue;
    acc += w * f.coeff(k) * g.coeff(2 - k);
  }
  return acc / 12.0;
}

FourierSeries bracket(const FourierSeries& f, const FourierSeries& g) {
  return multiply(f, g.derivativeZ()) - multiply(g, f.derivativeZ());
}

FourierSeries frameTangent(const FourierSeries& curve,
                           const FourierSeries& variation) {
  const int N = std::max(curve.order(), variation.order());
  const Eigen::VectorXcd tg = curve.withOrder(N).derivativeTheta().samples();
  const double tgMax = tg.cwiseAbs().maxCoeff();
  if (tg.cwiseAbs().minCoeff() < 1e-9 * tgMax)
    throw SolverError("frame", "curve tangent vanishes");
  const Eigen::VectorXcd dv = variation.withOrder(N).samples();
  Eigen::VectorXcd u(dv.size());
  for (int j = 0; j < dv.size(); ++j) u[j] = dv[j] / tg[j];
  return FourierSeries::analyze(u);
}

FourierSeries thetaFieldToZ(const FourierSeries& u) {
  FourierSeries out = FourierSeries::fromModes(u.order() + 1, {});
  const cd i(0.0, 1.0);
  for (int n = -u.order(); n <= u.order(); ++n)
    out.setCoeff(n + 1, i * u.coeff(n));
  return out;
}

// ---------------------------------------------------------------------------
// Two-parameter families and the 2-form integral
// ---------------------------------------------------------------------------

CurveFamily2D::CurveFamily2D(int S, int T, bool closedS, bool closedT,
                             double sLen, double tLen,
                             std::vector<FourierSeries> curves)
    : S_(S), T_(T), closedS_(closedS), closedT_(closedT), sLen_(sLen),
      tLen_(tLen), N_(1), curves_(std::move(curves)) {
  auto checkCount = [](int count, bool closed, const char* dir) {
    if (closed) {
      if (count < 5)
        throw ValidationError("family", std::string("closed ") + dir +
                                            " direction needs at least 5 nodes");
    } else {
      if (count < 9 || count % 2 == 0)
        throw ValidationError("family", std::string("open ") + dir +
                                            " direction needs an odd node "
                                            "count of at least 9");
    }
  };
  checkCount(S_, closedS_, "first");
  checkCount(T_, closedT_, "second");
  if (!(sLen_ > 0.0) || !(tLen_ > 0.0))
    throw ValidationError("family", "parameter lengths must be positive");
  if ((int)curves_.size() != S_ * T_)
    throw ValidationError("family", "curve count does not match the grid");
  for (const auto& c : curves_) N_ = std::max(N_, c.order());
  for (auto& c : curves_) c = c.withOrder(N_);
}

const FourierSeries& CurveFamily2D::at(int a, int b) const {
  if (a < 0 || a >= S_ || b < 0 || b >= T_)
    throw ValidationError("family", "node index out of range");
  return curves_[a * T_ + b];
}

namespace {

// Fourth-order derivative stencils in one family parameter applied to sample
// vectors; periodic wraparound on closed directions, one-sided at open edges.
std::vector<Eigen::VectorXcd> paramDerivative(
    const std::vector<Eigen::VectorXcd>& f, bool closed, double len) {
  const int S = (int)f.size();
  const double h = closed ? len / S : len / (S - 1);
  std::vector<Eigen::VectorXcd> d(S);
  auto wrap = [S](int a) { return ((a % S) + S) % S; };
  for (int a = 0; a < S; ++a) {
    if (closed || (a >= 2 && a <= S - 3)) {
      d[a] = (f[wrap(a - 2)] - 8.0 * f[wrap(a - 1)] + 8.0 * f[wrap(a + 1)] -
              f[wrap(a + 2)]) /
             (12.0 * h);
    } else if (a == 0) {
      d[a] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
              3.0 * f[4]) /
             (12.0 * h);
    } else if (a == 1) {
      d[a] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) /
             (12.0 * h);
    } else if (a == S - 2) {
      d[a] = (3.0 * f[S - 1] + 10.0 * f[S - 2] - 18.0 * f[S - 3] +
              6.0 * f[S - 4] - f[S - 5]) /
             (12.0 * h);
    } else {
      d[a] = (25.0 * f[S - 1] - 48.0 * f[S - 2] + 36.0 * f[S - 3] -
              16.0 * f[S - 4] + 3.0 * f[S - 5]) /
             (12.0 * h);
    }
  }
  return d;
}

std::vector<double> quadratureWeights(int S, bool closed, double len) {
  std::vector<double> w(S);
  if (closed) {
    std::fill(w.begin(), w.end(), len / S);
  } else {
    const double h = len / (S - 1);
    for (int a = 0; a < S; ++a)
      w[a] = (a == 0 || a == S - 1) ? h / 3.0
                                    : (a % 2 == 1 ? 4.0 * h / 3.0
                                                  : 2.0 * h / 3.0);
  }
  return w;
}

}  // namespace

cd formIntegral(const CurveFamily2D& fam) {
  const int S = fam.sNodes(), T = fam.tNodes();

  std::vector<Eigen::VectorXcd> samples(S * T);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < T; ++b) samples[a * T + b] = fam.at(a, b).samples();

  // Parameter derivatives of the sample field in both directions.
  std::vector<Eigen::VectorXcd> ds(S * T), dt(S * T);
  for (int b = 0; b < T; ++b) {
    std::vector<Eigen::VectorXcd> col(S);
    for (int a = 0; a < S; ++a) col[a] = samples[a * T + b];
    auto d = paramDerivative(col, fam.sClosed(), fam.sLength());
    for (int a = 0; a < S; ++a) ds[a * T + b] = d[a];
  }
  for (int a = 0; a < S; ++a) {
    std::vector<Eigen::VectorXcd> row(T);
    for (int b = 0; b < T; ++b) row[b] = samples[a * T + b];
    auto d = paramDerivative(row, fam.tClosed(), fam.tLength());
    for (int b = 0; b < T; ++b) dt[a * T + b] = d[b];
  }

  const auto ws = quadratureWeights(S, fam.sClosed(), fam.sLength());
  const auto wt = quadratureWeights(T, fam.tClosed(), fam.tLength());

  cd acc(0.0, 0.0);
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < T; ++b) {
      const FourierSeries& gamma = fam.at(a, b);
      const FourierSeries us =
          frameTangent(gamma, FourierSeries::analyze(ds[a * T + b]));
      const FourierSeries ut =
          frameTangent(gamma, FourierSeries::analyze(dt[a * T + b]));
      acc += ws[a] * wt[b] * cocycle(thetaFieldToZ(us), thetaFieldToZ(ut));
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Extension elements
// ---------------------------------------------------------------------------

VirasoroElement velementCompose(const VirasoroElement& a,
                                const VirasoroElement& b) {
  return VirasoroElement{compose(a.annulus, b.annulus), concat(a.path, b.path),
                         a.winding + b.winding, a.central + b.central};
}

bool velementEqual(const VirasoroElement& e1, const VirasoroElement& e2,
                   const CurveFamily2D& homotopy, double tol) {
  if (homotopy.sClosed() || homotopy.tClosed())
    throw ValidationError("velement",
                          "homotopy must be open in both parameters");
  if (e1.annulus.distanceTo(e2.annulus) > 1e-5) return false;

  const ExpResult x1 = expUniv(e1.path);
  const ExpResult x2 = expUniv(e2.path);
  if (x1.annulus.distanceTo(e1.annulus) > 1e-5 ||
      x2.annulus.distanceTo(e2.annulus) > 1e-5)
    throw ValidationError(
        "velement", "stored annulus does not match the path's exponential");

  const int N = std::max(homotopy.order(), std::max(x1.framing.N,
                                                    x2.framing.N));
  auto framingCurve = [N](const Framing& fr, double tau) {
    const Eigen::VectorXcd col =
        lagrangeCol(fr.h, fr.t0, (1.0 - tau) * fr.t0);
    return FourierSeries::analyze(col).withOrder(N).samples();
  };

  const int S = homotopy.sNodes(), T = homotopy.tNodes();
  const double tolB = 1e-6 * (1.0 + 2.0);  // curves live in O(1) discs
  for (int b = 0; b < T; ++b) {
    const double tau = homotopy.tLength() * b / (T - 1);
    const Eigen::VectorXcd row0 = homotopy.at(0, b).withOrder(N).samples();
    const Eigen::VectorXcd row1 =
        homotopy.at(S - 1, b).withOrder(N).samples();
    if ((row0 - framingCurve(x1.framing, tau)).cwiseAbs().maxCoeff() > tolB)
      throw ValidationError(
          "velement", "homotopy does not start at the first curve path");
    if ((row1 - framingCurve(x2.framing, tau)).cwiseAbs().maxCoeff() > tolB)
      throw ValidationError(
          "velement", "homotopy does not end at the second curve path");
  }

  const Eigen::VectorXcd circle = framingCurve(x1.framing, 0.0);
  const Eigen::VectorXcd inner = framingCurve(x1.framing, 1.0);
  for (int a = 0; a < S; ++a) {
    if ((homotopy.at(a, 0).withOrder(N).samples() - circle)
            .cwiseAbs()
            .maxCoeff() > tolB ||
        (homotopy.at(a, T - 1).withOrder(N).samples() - inner)
            .cwiseAbs()
            .maxCoeff() > tolB)
      throw ValidationError("velement",
                            "homotopy does not fix the endpoint curves");
  }

  const cd area = formIntegral(homotopy);
  return e1.winding == e2.winding &&
         std::abs(e2.central - e1.central - area) <= tol;
}

}  // namespace annulib
