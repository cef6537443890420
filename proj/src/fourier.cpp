#include "annulib/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace annulib {

namespace {

// FFTW plan cache.  Plans are created once per transform size with
// FFTW_ESTIMATE (deterministic, no measurement noise in the planning) and
// FFTW_UNALIGNED so they can be executed on any caller-provided buffer.
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine e;
    return e;
  }

  void forward(Eigen::VectorXcd& data) { run(data, FFTW_FORWARD); }
  void backward(Eigen::VectorXcd& data) { run(data, FFTW_BACKWARD); }

 private:
  void run(Eigen::VectorXcd& data, int sign) {
    const int n = static_cast<int>(data.size());
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto& slot = plans_[{n, sign}];
      if (slot == nullptr) {
        Eigen::VectorXcd tmp(n);
        slot = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(tmp.data()),
            reinterpret_cast<fftw_complex*>(tmp.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
      }
      plan = slot;
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
  }

  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

Eigen::VectorXd thetaGrid(int N) {
  const int n = 2 * N + 1;
  Eigen::VectorXd g(n);
  for (int j = 0; j < n; ++j) g[j] = 2.0 * std::numbers::pi * j / n;
  return g;
}

FourierSeries::FourierSeries(int N) : N_(N), c_(Eigen::VectorXcd::Zero(2 * N + 1)) {
  if (N < 0) throw ValidationError("fourier", "order must be non-negative");
}

FourierSeries FourierSeries::analyze(const Eigen::VectorXcd& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 1 || n % 2 == 0)
    throw ValidationError("fourier",
                          "analyze needs an odd number of samples, got " +
                              std::to_string(n));
  const int N = (n - 1) / 2;
  Eigen::VectorXcd bins = samples;
  FftEngine::instance().forward(bins);
  bins /= static_cast<double>(n);
  FourierSeries out(N);
  // DFT bin k holds mode k for k <= N and mode k - n for k > N.
  for (int k = 0; k <= N; ++k) out.c_[N + k] = bins[k];
  for (int k = N + 1; k < n; ++k) out.c_[N + (k - n)] = bins[k];
  return out;
}

FourierSeries FourierSeries::fromModes(
    int N, std::initializer_list<std::pair<int, cd>> modes) {
  FourierSeries out(N);
  for (const auto& [n, v] : modes) out.setCoeff(n, v);
  return out;
}

cd FourierSeries::coeff(int n) const {
  if (n < -N_ || n > N_) return cd(0.0, 0.0);
  return c_[N_ + n];
}

void FourierSeries::setCoeff(int n, cd v) {
  if (n < -N_ || n > N_)
    throw ValidationError("fourier", "mode " + std::to_string(n) +
                                         " outside order " + std::to_string(N_));
  c_[N_ + n] = v;
}

Eigen::VectorXcd FourierSeries::samples() const {
  const int n = gridSize();
  Eigen::VectorXcd bins = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k <= N_; ++k) bins[k] = c_[N_ + k];
  for (int k = N_ + 1; k < n; ++k) bins[k] = c_[N_ + (k - n)];
  FftEngine::instance().backward(bins);
  return bins;
}

cd FourierSeries::evalTheta(double theta) const {
  // Horner on the positive and negative halves in e^{i theta}.
  const cd e(std::cos(theta), std::sin(theta));
  cd pos = c_[2 * N_];
  for (int n = N_ - 1; n >= 0; --n) pos = pos * e + c_[N_ + n];
  cd neg(0.0, 0.0);
  const cd einv = std::conj(e);
  for (int n = -N_; n <= -1; ++n) neg = (neg + c_[N_ + n]) * einv;
  // neg accumulated as (((c_{-N}) /e + c_{-N+1})/e + ...)/e  -> sum c_n e^{in}
  return pos + neg;
}

cd FourierSeries::evalPoint(cd z) const {
  cd pos = c_[2 * N_];
  for (int n = N_ - 1; n >= 0; --n) pos = pos * z + c_[N_ + n];
  cd neg(0.0, 0.0);
  const cd zinv = 1.0 / z;
  for (int n = -N_; n <= -1; ++n) neg = (neg + c_[N_ + n]) * zinv;
  return pos + neg;
}

cd FourierSeries::derivPoint(cd z) const {
  // d/dz sum c_n z^n = sum n c_n z^{n-1}.
  cd pos(0.0, 0.0);
  for (int n = N_; n >= 1; --n) pos = pos * z + static_cast<double>(n) * c_[N_ + n];
  cd neg(0.0, 0.0);
  const cd zinv = 1.0 / z;
  for (int n = -N_; n <= -1; ++n)
    neg = (neg + static_cast<double>(n) * c_[N_ + n]) * zinv;
  return pos + neg * zinv;  // negative part: sum n c_n z^{n-1}, n<0
}

FourierSeries FourierSeries::derivativeTheta() const {
  FourierSeries out(N_);
  for (int n = -N_; n <= N_; ++n)
    out.c_[N_ + n] = cd(0.0, static_cast<double>(n)) * c_[N_ + n];
  return out;
}

FourierSeries FourierSeries::derivativeZ() const {
  FourierSeries out(N_ + 1);
  for (int m = -N_ - 1; m <= N_ - 1; ++m)
    out.setCoeff(m, static_cast<double>(m + 1) * coeff(m + 1));
  return out;
}

FourierSeries FourierSeries::hilbert() const {
  FourierSeries out(N_);
  for (int n = -N_; n <= N_; ++n)
    out.c_[N_ + n] = (n >= 0 ? 0.5 : -0.5) * c_[N_ + n];
  return out;
}

FourierSeries FourierSeries::withOrder(int N) const {
  FourierSeries out(N);
  const int m = std::min(N, N_);
  for (int n = -m; n <= m; ++n) out.c_[N + n] = c_[N_ + n];
  return out;
}

FourierSeries FourierSeries::projectToModes(int lo, int hi,
                                            double* discarded) const {
  FourierSeries out(N_);
  double mass = 0.0;
  for (int n = -N_; n <= N_; ++n) {
    if (n >= lo && n <= hi)
      out.c_[N_ + n] = c_[N_ + n];
    else
      mass += std::norm(c_[N_ + n]);
  }
  if (discarded) *discarded = std::sqrt(mass);
  return out;
}

FourierSeries FourierSeries::conjugated() const {
  FourierSeries out(N_);
  for (int n = -N_; n <= N_; ++n) out.c_[N_ + n] = std::conj(c_[N_ - n]);
  return out;
}

double FourierSeries::l2Norm() const { return c_.norm(); }

double FourierSeries::supOnGrid() const {
  return samples().cwiseAbs().maxCoeff();
}

double FourierSeries::tailFraction() const {
  const double total = c_.squaredNorm();
  if (total == 0.0) return 0.0;
  const int cut = static_cast<int>(std::floor(0.9 * N_));
  double tail = 0.0;
  for (int n = -N_; n <= N_; ++n)
    if (std::abs(n) > cut) tail += std::norm(c_[N_ + n]);
  return tail / total;
}

bool FourierSeries::underResolved(double tol) const {
  return tailFraction() > tol;
}

double FourierSeries::maxImagOnGrid() const {
  return samples().imag().cwiseAbs().maxCoeff();
}

FourierSeries FourierSeries::operator+(const FourierSeries& o) const {
  const int N = std::max(N_, o.N_);
  FourierSeries out(N);
  for (int n = -N; n <= N; ++n) out.c_[N + n] = coeff(n) + o.coeff(n);
  return out;
}

FourierSeries FourierSeries::operator-(const FourierSeries& o) const {
  const int N = std::max(N_, o.N_);
  FourierSeries out(N);
  for (int n = -N; n <= N; ++n) out.c_[N + n] = coeff(n) - o.coeff(n);
  return out;
}

FourierSeries FourierSeries::operator*(cd s) const {
  FourierSeries out(N_);
  out.c_ = c_ * s;
  return out;
}

FourierSeries multiply(const FourierSeries& a, const FourierSeries& b) {
  const int N = std::max(a.order(), b.order());
  const Eigen::VectorXcd sa = a.withOrder(N).samples();
  const Eigen::VectorXcd sb = b.withOrder(N).samples();
  return FourierSeries::analyze(sa.cwiseProduct(sb));
}

}  // namespace annulib
