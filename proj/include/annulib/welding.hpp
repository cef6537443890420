#pragma once
// Conformal welding of a circle diffeomorphism.
//
// weld(phi) produces the unique pair of univalent maps
//     f_plus  : D -> C           (Taylor modes 0..N)
//     f_minus : {|z|>1} -> C     (f_minus(z) = z + b1/z + ..., modes <= 1,
//                                 mode 1 equal to 1, mode 0 absent)
// whose boundary values satisfy  f_plus(phi-image) = f_minus, i.e.
// f_plus(e^{i phi(theta)}) = f_minus(e^{i theta}).  The images of the two
// maps tile the sphere along the common welding curve.
//
// Numerically f_minus solves a second-kind system  (I + M) f = z  on the
// grid, where M is the Nystrom discretization of the smoothing conjugated
// Hilbert-transform difference; its kernel
//     K(z,w) = 1/(w-z) - phi'(w)/(phi(w)-phi(z))
// is smooth on the torus with diagonal limit -phi''(z)/(2 phi'(z)).

#include "annulib/geometry.hpp"

namespace annulib {

struct WeldingDiagnostics {
  double linearResidual = 0.0;   // relative residual of the grid solve
  double hardyDefectMinus = 0.0; // l2 mass removed from f_minus (modes 0, >=2)
  double hardyDefectPlus = 0.0;  // l2 mass removed from f_plus (modes < 0)
  double mode1Defect = 0.0;      // |mode-1 coefficient - 1| before rescaling
};

struct WeldingSolution {
  FourierSeries f_plus;
  FourierSeries f_minus;
  CircleDiffeo phi;
  // sup |f_plus(e^{i phi(theta)}) - f_minus(e^{i theta})| on a 4x oversampled
  // grid; the primary quality measure, spectrally small for resolved phi.
  double residual = 0.0;
  WeldingDiagnostics diag;
};

// Kernel value at grid angles (thetaZ, thetaW), including the diagonal limit.
cd weldingKernel(const CircleDiffeo& phi, double thetaZ, double thetaW);

// Dense Nystrom matrix M[j,k] = K(z_j, w_k) w_k / (2N+1) of the smoothing
// operator on the canonical grid.
Eigen::MatrixXcd weldingKernelMatrix(const CircleDiffeo& phi);

WeldingSolution weld(const CircleDiffeo& phi);

// Far-from-identity welding: split phi into `steps` incremental
// near-identity factors along phi_s(theta) = theta + s p(theta), weld each
// factor, and multiply the resulting thin annuli.  steps = 1 reduces to
// weld(phi).  Throws SolverError tagged with the failing step.
WeldingSolution weldFar(const CircleDiffeo& phi, int steps);

// sup-norm boundary mismatch of a candidate pair for phi, evaluated on an
// oversampled grid.
double weldingMismatch(const FourierSeries& f_plus,
                       const FourierSeries& f_minus, const CircleDiffeo& phi);

}  // namespace annulib
