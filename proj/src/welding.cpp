#include "annulib/welding.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

namespace annulib {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// phi as a map of the unit circle in the z coordinate, together with the
// theta-derivatives needed for the kernel.
struct PhiData {
  Eigen::VectorXd phi;    // phi(theta_j)
  Eigen::VectorXd dphi;   // phi'(theta_j)
  Eigen::VectorXd ddphi;  // phi''(theta_j)
  Eigen::VectorXcd z;     // e^{i theta_j}
  Eigen::VectorXcd w;     // e^{i phi(theta_j)}
  Eigen::VectorXcd wz;    // d/dz of the circle map at e^{i theta_j}
};

PhiData phiData(const CircleDiffeo& phi) {
  const int N = phi.order();
  const int n = 2 * N + 1;
  const FourierSeries& p = phi.displacement();
  PhiData d;
  d.phi = phi.gridImages();
  d.dphi = Eigen::VectorXd::Ones(n) + p.derivativeTheta().samples().real();
  d.ddphi = p.derivativeTheta().derivativeTheta().samples().real();
  d.z.resize(n);
  d.w.resize(n);
  d.wz.resize(n);
  const Eigen::VectorXd grid = thetaGrid(N);
  for (int j = 0; j < n; ++j) {
    d.z[j] = cd(std::cos(grid[j]), std::sin(grid[j]));
    d.w[j] = cd(std::cos(d.phi[j]), std::sin(d.phi[j]));
    // d/dz e^{i phi(theta)} = e^{i(phi - theta)} phi'(theta)
    d.wz[j] = d.w[j] / d.z[j] * d.dphi[j];
  }
  return d;
}

cd kernelEntry(const PhiData& d, int j, int k) {
  if (j != k)
    return 1.0 / (d.z[k] - d.z[j]) - d.wz[k] / (d.w[k] - d.w[j]);
  // Diagonal limit -phi''_z / (2 phi'_z) in the z coordinate:
  // phi''_z/phi'_z = [i(phi'-1) + phi''/phi'] / (i z).
  const cd logderiv =
      cd(0.0, d.dphi[j] - 1.0) + cd(d.ddphi[j] / d.dphi[j], 0.0);
  return -logderiv / (cd(0.0, 2.0) * d.z[j]);
}

}  // namespace

cd weldingKernel(const CircleDiffeo& phi, double thetaZ, double thetaW) {
  const cd z(std::cos(thetaZ), std::sin(thetaZ));
  const cd w(std::cos(thetaW), std::sin(thetaW));
  const double pz = phi.eval(thetaZ);
  const double pw = phi.eval(thetaW);
  const double dpw = phi.derivative(thetaW);
  const cd fz(std::cos(pz), std::sin(pz));
  const cd fw(std::cos(pw), std::sin(pw));
  if (std::abs(std::remainder(thetaZ - thetaW, kTwoPi)) < 1e-12) {
    const FourierSeries dp = phi.displacement().derivativeTheta();
    const double ddpw = dp.derivativeTheta().evalTheta(thetaW).real();
    const cd logderiv = cd(0.0, dpw - 1.0) + cd(ddpw / dpw, 0.0);
    return -logderiv / (cd(0.0, 2.0) * z);
  }
  return 1.0 / (w - z) - (fw / w * dpw) / (fw - fz);
}

Eigen::MatrixXcd weldingKernelMatrix(const CircleDiffeo& phi) {
  const int n = 2 * phi.order() + 1;
  const PhiData d = phiData(phi);
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      M(j, k) = kernelEntry(d, j, k) * d.z[k] / static_cast<double>(n);
  return M;
}

double weldingMismatch(const FourierSeries& f_plus,
                       const FourierSeries& f_minus, const CircleDiffeo& phi) {
  const int M = 4 * std::max(f_plus.order(), f_minus.order()) + 3;
  const Eigen::VectorXd grid = thetaGrid(M);
  double sup = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const cd lhs = f_plus.evalTheta(phi.eval(grid[j]));
    const cd rhs = f_minus.evalTheta(grid[j]);
    sup = std::max(sup, std::abs(lhs - rhs));
  }
  return sup;
}

WeldingSolution weld(const CircleDiffeo& phi) {
  const int N = phi.order();
  const int n = 2 * N + 1;
  const PhiData d = phiData(phi);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      A(j, k) += kernelEntry(d, j, k) * d.z[k] / static_cast<double>(n);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const Eigen::VectorXcd fm = lu.solve(d.z);
  const double linres = (A * fm - d.z).cwiseAbs().maxCoeff();
  if (!std::isfinite(linres) || linres > 1e-6)
    throw SolverError("weld", "grid system not solvable (residual " +
                                  std::to_string(linres) + ")");

  // Project onto the allowed support of f_minus: mode 1 plus modes <= -1.
  FourierSeries raw = FourierSeries::analyze(fm);
  WeldingDiagnostics diag;
  diag.linearResidual = linres;
  FourierSeries fminus = raw.projectToModes(-N, 1, &diag.hardyDefectMinus);
  {
    double extra = 0.0;
    const cd m0 = fminus.coeff(0);
    fminus.setCoeff(0, cd(0.0, 0.0));
    extra = std::abs(m0);
    diag.hardyDefectMinus = std::hypot(diag.hardyDefectMinus, extra);
  }
  const cd m1 = fminus.coeff(1);
  diag.mode1Defect = std::abs(m1 - cd(1.0, 0.0));
  if (std::abs(m1) < 1e-8)
    throw SolverError("weld", "degenerate solution: leading coefficient "
                              "vanished");
  fminus = fminus * (1.0 / m1);

  // f_plus = f_minus o phi^{-1} on the circle, then Hardy projection.
  const CircleDiffeo phiInv = phi.inverse();
  const Eigen::VectorXd pre = phiInv.gridImages();
  Eigen::VectorXcd fp(n);
  for (int j = 0; j < n; ++j) fp[j] = fminus.evalTheta(pre[j]);
  FourierSeries fplus =
      FourierSeries::analyze(fp).projectToModes(0, N, &diag.hardyDefectPlus);

  WeldingSolution out{fplus, fminus, phi, 0.0, diag};
  out.residual = std::max({weldingMismatch(fplus, fminus, phi),
                           diag.linearResidual, diag.mode1Defect});
  return out;
}

}  // namespace annulib
