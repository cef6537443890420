#pragma once
// Normalized annuli and their semigroup structure.
//
// A (possibly partially thin) annulus is stored through the boundary pair
//     psi_minus(z) = z + b1/z + b2/z^2 + ...   (exterior side, modes <= 1,
//                                               mode 1 exactly 1, mode 0 = 0)
//     psi_plus(z)  = a0 + a1 z + a2 z^2 + ...  (interior side, Taylor modes)
// mapping {|z|>=1} resp. {|z|<=1} onto the two complementary pieces of the
// model: the annulus material is the region between the curves
// psi_plus(S^1) (inner boundary) and psi_minus(S^1) (outer boundary).  The
// interiors of the two image discs are disjoint; the boundary curves may
// touch (partially thin) or coincide (completely thin).

#include "annulib/geometry.hpp"
#include "annulib/welding.hpp"

namespace annulib {

class NormalizedAnnulus {
 public:
  // The empty (completely thin, trivially glued) annulus: (z, z).
  static NormalizedAnnulus identityElement(int N);
  // Round annulus of modulus q in (0, 1]: pair (z, q z).
  static NormalizedAnnulus round(double q, int N);
  // Thick or thin annulus cut out by a univalent f : D -> D: pair (z, f).
  static NormalizedAnnulus fromUnivalent(const FourierSeries& f);
  // Completely thin annulus carrying the gluing diffeomorphism psi; the
  // boundary pair is the welding of psi^{-1}, so that psi_plus = psi_minus o
  // psi on the circle.
  static NormalizedAnnulus fromDiffeo(const CircleDiffeo& psi);
  // Wrap an existing pair (validated).
  static NormalizedAnnulus fromPair(const FourierSeries& psi_minus,
                                    const FourierSeries& psi_plus,
                                    double residual = 0.0);

  const FourierSeries& psiMinus() const { return bm_; }
  const FourierSeries& psiPlus() const { return bp_; }
  int order() const { return bm_.order(); }
  double residual() const { return residual_; }

  JordanCurve outerCurve() const { return JordanCurve(bm_); }
  JordanCurve innerCurve() const { return JordanCurve(bp_); }

  // Distance between the two boundary curves; 0 iff the annulus is (at least
  // partially) thin.
  double thinness() const;

  // sup over both boundary series of the coefficient-vector distance; the
  // comparison metric used by tests.
  double distanceTo(const NormalizedAnnulus& other) const;

 private:
  NormalizedAnnulus(FourierSeries bm, FourierSeries bp, double residual)
      : bm_(std::move(bm)), bp_(std::move(bp)), residual_(residual) {}

  FourierSeries bm_, bp_;
  double residual_;
};

// Semigroup composition: glue the inner boundary of `a` to the outer
// boundary of `b` (a sits outside, b inside), uniformize the glued annulus
// by conformal welding, and renormalize.  Binary ops work at the larger of
// the two orders.
NormalizedAnnulus compose(const NormalizedAnnulus& a,
                          const NormalizedAnnulus& b);

// Orientation-reversing involution (adjoint element): reflect both sides
// through the unit circle and restore the normalization with the Mobius map
// determined by the first three inner Taylor coefficients.  An
// anti-automorphism: dagger(a o b) = dagger(b) o dagger(a).
NormalizedAnnulus dagger(const NormalizedAnnulus& a);

// Action on embedded discs: a disc object is a univalent u : D -> D with
// analytic boundary; the annulus fills its inner hole around the disc and
// the re-embedded disc is psi_plus o u.
FourierSeries actOnDisc(const NormalizedAnnulus& a, const FourierSeries& u);

// | contour integral over the outer boundary - contour integral over the
// inner boundary | of a holomorphic 1-form  omega(z) dz  given by a Laurent
// series; zero for forms holomorphic on the annulus material.
double cauchyConsistency(const NormalizedAnnulus& a, const FourierSeries& omega);

}  // namespace annulib
