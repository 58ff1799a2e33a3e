#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace memnet {

using cplx = std::complex<double>;

/// Real-to-complex transform of fixed length backed by FFTW. Plans are
/// created once per length and shared; execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  /// out[0..n/2] = DFT(in[0..n-1]).
  void forward(const double* in, cplx* out) const;
  /// Unnormalised inverse: out = n * IDFT(in).
  void inverse(const cplx* in, double* out) const;

  struct Plans;

 private:
  int n_;
  std::shared_ptr<const Plans> plans_;
};

/// Smallest power of two >= n.
int next_pow2(int n);

/// Linear convolution c[t] = sum_j a[j] b[t-j], truncated to the first
/// `out_len` outputs.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t out_len);

}  // namespace memnet
