#pragma once
// Circle diffeomorphisms, parametrized Jordan curves, and boundary-integral
// Riemann maps (interior and exterior) via the Kerzman-Stein equation.

#include "annulib/fourier.hpp"

namespace annulib {

// Orientation-preserving diffeomorphism of the circle, stored through its
// periodic displacement: phi(theta) = theta + p(theta) with p real-valued
// and 1 + p' > 0.
class CircleDiffeo {
 public:
  static CircleDiffeo identity(int N);
  static CircleDiffeo rotation(double alpha, int N);
  // Validates realness and strict monotonicity of theta + p(theta).
  static CircleDiffeo fromDisplacement(const FourierSeries& p);

  double eval(double theta) const;
  double derivative(double theta) const;  // phi'(theta) = 1 + p'(theta)

  // phi(theta_j) on the canonical grid.
  Eigen::VectorXd gridImages() const;

  // phi(e^{i theta}) as points of the unit circle on the canonical grid.
  Eigen::VectorXcd circleImages() const;

  CircleDiffeo inverse() const;
  // Function composition: (this o inner)(theta) = this(inner(theta)).
  // The result is represented at the larger of the two orders.
  CircleDiffeo composeWith(const CircleDiffeo& inner) const;

  const FourierSeries& displacement() const { return p_; }
  int order() const { return p_.order(); }
  CircleDiffeo withOrder(int N) const;

  double minDerivative() const;
  // sup |this(theta) - other(theta)| on an oversampled grid.
  double distanceTo(const CircleDiffeo& other) const;

 private:
  explicit CircleDiffeo(FourierSeries p) : p_(std::move(p)) {}
  FourierSeries p_;
};

// Smooth positively-oriented Jordan curve given by a Fourier parametrization
// gamma(theta).  Construction checks simplicity (chordal/arc ratio) and a
// non-vanishing tangent.
class JordanCurve {
 public:
  explicit JordanCurve(FourierSeries gamma);

  const FourierSeries& series() const { return g_; }
  int order() const { return g_.order(); }

  cd point(double theta) const { return g_.evalTheta(theta); }
  cd tangent(double theta) const { return dg_.evalTheta(theta); }
  Eigen::VectorXcd pointSamples() const { return g_.samples(); }
  Eigen::VectorXcd tangentSamples() const { return dg_.samples(); }

  // Winding number of the curve about p (trapezoid of gamma'/(gamma-p)).
  int windingAbout(cd p) const;

  // A point strictly inside the curve (winding 1); throws if none found.
  cd interiorPoint() const;

  // min over distinct node pairs of |gamma_j - gamma_k| / chord of the
  // unit-circle nodes; 1 for the identity circle, -> 0 for self-contact.
  double injectivityRatio() const;
  double minTangentNorm() const;
  double maxTangentNorm() const;

 private:
  FourierSeries g_;
  FourierSeries dg_;
};

// Conformal map onto one side of a Jordan curve, returned through its
// boundary data:
//  - map: Fourier coefficients of the boundary values on |z| = 1
//    (Taylor modes for the interior map, modes <= 1 for the exterior map);
//  - correspondence: circle diffeo  t(phi)  with  map(e^{i phi}) =
//    gamma(t(phi)), i.e. the boundary parameter correspondence;
//  - residual: combined solver diagnostics (off-support coefficient mass,
//    anchor mismatch, unimodularity defect of the Szego phase).
struct RiemannMap {
  FourierSeries map;
  CircleDiffeo correspondence;
  double residual = 0.0;

  cd capacity() const { return map.coeff(1); }  // derivative at the center / infinity
};

// Interior map F : D -> Int(gamma), F(0) = anchor, F'(0) > 0.
// Throws SolverError when the residual exceeds tol.
RiemannMap riemannInterior(const JordanCurve& curve, cd anchor,
                           double tol = 1e-6);

// Exterior map E : {|z|>1} -> Ext(gamma), E(infinity) = infinity,
// E'(infinity) > 0;  E(z) = c1 z + b0 + b1/z + ...  with c1 > 0 (the
// capacity of the curve).  Callers needing the vanishing-constant
// normalization subtract coeff(0).
RiemannMap riemannExterior(const JordanCurve& curve, double tol = 1e-6);

}  // namespace annulib
