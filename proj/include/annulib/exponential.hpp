#pragma once

#include <Eigen/Dense>

#include "annulib/annulus.hpp"

namespace annulib {

// A time-dependent boundary vector field X(theta, t) d/dtheta sampled on the
// product grid: theta on the standard 2N+1 nodes, t on M uniform nodes over
// [0, t0].  Column k of `X` holds the field at time t_k = t0 * k / (M - 1).
//
// Admissible generating directions have Im X >= 0 on the circle; fields whose
// Fourier support lies in modes >= -1 extend holomorphically into the disc
// and generate hole-type annuli.
class LiePath {
 public:
  LiePath(int N, int M, double t0, Eigen::MatrixXcd samples);

  // Time-independent field repeated across M nodes.
  static LiePath constant(const FourierSeries& field, int M, double t0);

  int order() const { return N_; }
  int timeNodes() const { return M_; }
  double horizon() const { return t0_; }
  double dt() const { return t0_ / (M_ - 1); }
  const Eigen::MatrixXcd& samples() const { return X_; }

  FourierSeries slice(int k) const;

  // Largest violation of Im X >= 0 over the grid (0 when inside the cone).
  double coneDefect() const;
  bool coneOk(double tol = 1e-12) const { return coneDefect() <= tol; }

  // True when every time slice has negligible Fourier mass in modes <= -2,
  // so the field extends into the disc.
  bool discType(double tol = 1e-12) const;

  // True when the field vanishes on the first and last 5% of the interval.
  bool hasSittingInstants(double tol = 1e-9) const;

  double supNorm() const;

 private:
  int N_, M_;
  double t0_;
  Eigen::MatrixXcd X_;  // (2N+1) x M
};

// The evolving boundary h(theta, t): column k is the image of the unit circle
// at time t_k under the flow, with h(., t0) the identity circle and h(., 0)
// the inner boundary of the generated annulus.
struct Framing {
  int N;
  int M;
  double t0;
  Eigen::MatrixXcd h;  // (2N+1) x M
  NormalizedAnnulus annulus;

  FourierSeries column(int k) const;
};

struct ExpResult {
  NormalizedAnnulus annulus;
  Framing framing;
  double residual;   // substep self-difference plus truncation tails
  int substeps;      // RK4 substeps per time interval that were accepted
};

// Time-ordered exponential of a disc-type cone path: integrates the
// characteristic flow of Y(z,t) = i z X(theta(z), t) backwards through the
// columns and assembles the annulus (z, k(., 0)) together with its framing.
// RK4 substeps are refined (1, 2, 4, 8) until the inner boundary is stable
// to `tol`.
ExpResult expUniv(const LiePath& path, double tol = 1e-11);

// Recovers the generating field X = -h_t / h_theta from a framing (spectral
// in theta, 4th-order finite differences in time; needs M >= 5).  Checks the
// evolution preserves orientation: Im(conj(h_t) h_theta) >= -1e-10.
LiePath pathFromFraming(const Framing& fr);

// Sup-norm of f_t + X f_theta over the grid for a scalar field f sampled like
// a framing; zero exactly when f is transported by the flow.
double transportResidual(const Eigen::MatrixXcd& f, const LiePath& path);

// Transport residual of the framing itself against a path.
double xholoResidual(const Framing& fr, const LiePath& path);

// Cauchy-integral reconstruction on the annulus carried by a framing:
//   (1 / 2 pi i) [ integral over the outer boundary of gOut(w)/(w - z) dw
//                - integral over the inner boundary of gIn(w)/(w - z) dw ].
// `z` must lie strictly between the boundaries (winding 1 about it from the
// outer contour, 0 from the inner) and at least one grid arclength away.
cd cauchyReconstruct(const Framing& fr, const FourierSeries& gOut,
                     const FourierSeries& gIn, cd z);

// Beltrami-type coefficient mu = (X - i) / (X + i) over the grid; |mu| <= 1
// exactly on the cone Im X >= 0.  Fails if the field hits -i.
Eigen::MatrixXcd beltrami(const LiePath& path);

// Concatenation matched to composition: exp(concat(a, b)) equals
// compose(exp(a), exp(b)), so b occupies the early time interval.  Both paths
// must sit at their endpoints and share the same time step.
LiePath concat(const LiePath& a, const LiePath& b);

// Smooth reparametrization in time making the field vanish identically on the
// first and last 5% of the interval without changing the exponential.
LiePath makeSittingInstants(const LiePath& path, int newM = -1);

// Resamples the field onto M uniform time nodes (local cubic interpolation).
LiePath resampleTime(const LiePath& path, int M);

// Pullback of the fixed vector field v(z) d/dz through the framing:
// f = (v o h) / h_theta.  Returns the sup-norm of f_t - (X_theta f - X f_theta),
// which vanishes for the exact flow.
double pullbackFieldResidual(const Framing& fr, const LiePath& path,
                             const FourierSeries& v);

// Winding degree of a thin loop: X must be real-valued and its time-t0 flow
// must return every starting point to itself modulo a full turn; returns the
// shared integer number of turns.
int windingThinLoop(const LiePath& path);

}  // namespace annulib
