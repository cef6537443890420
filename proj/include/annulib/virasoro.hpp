#pragma once

#include <vector>

#include "annulib/exponential.hpp"

namespace annulib {

// Central cocycle of two holomorphic vector fields f(z) d/dz, g(z) d/dz given
// by their Laurent coefficients:
//   omega(f, g) = (1/12) sum_k k (k-1) (k-2) f_k g_{2-k},
// normalized so that pairing z^{m+1} d/dz with z^{-m+1} d/dz gives
// (m^3 - m) / 12.
cd cocycle(const FourierSeries& f, const FourierSeries& g);

// Commutator [f, g] = f g' - g f' of vector fields on the z-plane.
FourierSeries bracket(const FourierSeries& f, const FourierSeries& g);

// Tangent of a curve variation written in the curve's own frame:
// u(theta) = (delta gamma)(theta) / gamma_theta(theta).
FourierSeries frameTangent(const FourierSeries& curve,
                           const FourierSeries& variation);

// Converts a boundary field u(theta) d/dtheta to the z-plane field
// U(z) d/dz = i z u~(z) d/dz, i.e. U_m = i u_{m-1}.
FourierSeries thetaFieldToZ(const FourierSeries& u);

// A two-parameter family of curves gamma_{a,b}, a < S, b < T, stored
// row-major (index a * T + b).  A closed direction is periodic with the given
// parameter length and needs at least 5 nodes; an open direction spans
// [0, length] and needs an odd node count >= 9 so Simpson weights apply.
class CurveFamily2D {
 public:
  CurveFamily2D(int S, int T, bool closedS, bool closedT, double sLen,
                double tLen, std::vector<FourierSeries> curves);

  int sNodes() const { return S_; }
  int tNodes() const { return T_; }
  bool sClosed() const { return closedS_; }
  bool tClosed() const { return closedT_; }
  double sLength() const { return sLen_; }
  double tLength() const { return tLen_; }
  int order() const { return N_; }
  const FourierSeries& at(int a, int b) const;

 private:
  int S_, T_;
  bool closedS_, closedT_;
  double sLen_, tLen_;
  int N_;
  std::vector<FourierSeries> curves_;
};

// Integral of the cocycle 2-form over the family: at each node the two
// parameter derivatives are converted to frame fields and paired, then the
// scalar field is integrated (periodic trapezoid on closed directions,
// Simpson on open ones).
cd formIntegral(const CurveFamily2D& family);

// An element of the centrally extended semigroup: the annulus, the generating
// path, the turn count of its thin part, and the central coordinate.
struct VirasoroElement {
  NormalizedAnnulus annulus;
  LiePath path;
  int winding;
  cd central;
};

VirasoroElement velementCompose(const VirasoroElement& a,
                                const VirasoroElement& b);

// Decides equality of two extension elements over an explicit homotopy
// between their induced curve paths.  The homotopy family must be open in
// both directions, its s = 0 and s = 1 rows must reproduce the curve paths
// tau -> h(., (1 - tau) t0) of the two elements, and every row must pin the
// same endpoint curves; violations raise validation errors.  The elements are
// equal when their annuli and windings agree and the central coordinates
// differ by exactly the 2-form area of the homotopy (within tol).
bool velementEqual(const VirasoroElement& e1, const VirasoroElement& e2,
                   const CurveFamily2D& homotopy, double tol);

}  // namespace annulib
