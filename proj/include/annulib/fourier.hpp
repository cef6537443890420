#pragma once
// Truncated Fourier / Laurent series on the unit circle.
//
// A series of order N stores the modes n = -N..N of
//     F(theta) = sum_n c_n e^{i n theta},
// equivalently the Laurent polynomial sum_n c_n z^n sampled at z = e^{i theta}.
// Every series is tied to the canonical grid theta_j = 2 pi j / (2N+1),
// j = 0..2N.  The odd point count means each stored mode is resolved without
// a Nyquist ambiguity, and analyze/synthesize are exact mutual inverses.

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace annulib {

using cd = std::complex<double>;

// Library errors carry a short stage tag ("weld", "riemann", ...) so callers
// (in particular the CLI) can report where a computation failed.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& msg)
      : std::runtime_error(stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Precondition / contract violations detected on input data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failures inside a solver (singular system, divergent iteration).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data (bad JSON, missing fields, wrong kinds).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Canonical sample grid theta_j = 2 pi j / (2N+1), j = 0..2N.
Eigen::VectorXd thetaGrid(int N);

class FourierSeries {
 public:
  FourierSeries() : N_(0), c_(Eigen::VectorXcd::Zero(1)) {}
  explicit FourierSeries(int N);

  // Collocation: recover coefficients from samples on the canonical grid
  // (size must be odd, 2N+1).  Exact inverse of samples() to rounding.
  static FourierSeries analyze(const Eigen::VectorXcd& samples);

  // Build from a sparse mode list {n, value}.
  static FourierSeries fromModes(int N,
                                 std::initializer_list<std::pair<int, cd>> modes);

  int order() const { return N_; }
  int gridSize() const { return 2 * N_ + 1; }

  // Coefficient of e^{i n theta}; zero outside -N..N.
  cd coeff(int n) const;
  void setCoeff(int n, cd v);

  // Values on the canonical grid (inverse of analyze()).
  Eigen::VectorXcd samples() const;

  // Pointwise evaluation.
  cd evalTheta(double theta) const;          // sum c_n e^{i n theta}
  cd evalPoint(cd z) const;                  // Laurent sum, z != 0
  cd derivPoint(cd z) const;                 // d/dz of the Laurent sum

  // d/dtheta (mode-wise multiplication by i n; order unchanged).
  FourierSeries derivativeTheta() const;
  // d/dz of the Laurent polynomial (order grows by one).
  FourierSeries derivativeZ() const;

  // Hilbert transform: +1/2 on modes n >= 0, -1/2 on modes n < 0.
  FourierSeries hilbert() const;

  // Same function represented at a different order (pad with zeros /
  // truncate; truncation reports nothing, use projectToModes for that).
  FourierSeries withOrder(int N) const;

  // Zero out all modes outside [lo, hi]; returns the l2 norm of what was
  // discarded so callers can fold it into a residual.
  FourierSeries projectToModes(int lo, int hi, double* discarded = nullptr) const;

  // Complex conjugate of the function: conj(F)(theta) has modes
  // n -> conj(c_{-n}).
  FourierSeries conjugated() const;

  // Diagnostics.
  double l2Norm() const;
  double supOnGrid() const;
  // Fraction of l2 mass carried by the top decile of |n| (|n| > 0.9 N).
  double tailFraction() const;
  bool underResolved(double tol = 1e-8) const;
  // Max |Im F| on the grid; small for real-valued functions.
  double maxImagOnGrid() const;

  FourierSeries operator+(const FourierSeries& o) const;
  FourierSeries operator-(const FourierSeries& o) const;
  FourierSeries operator*(cd s) const;

 private:
  int N_;
  Eigen::VectorXcd c_;  // index i <-> mode i - N_
};

// Pointwise product of sample vectors, re-analyzed at the larger order of the
// two operands (binary ops pad to the larger resolution).
FourierSeries multiply(const FourierSeries& a, const FourierSeries& b);

}  // namespace annulib
