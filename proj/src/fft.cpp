#include "memnet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace memnet {

struct RealFft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
};

namespace {

std::shared_ptr<const RealFft::Plans> cached_plans(int n);

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("RealFft: length must be positive");
  plans_ = cached_plans(n);
}

void RealFft::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(const cplx* in, double* out) const {
  // c2r destroys its input, so work on a copy.
  std::vector<cplx> tmp(in, in + spectrum_size());
  fftw_execute_dft_c2r(plans_->inv, reinterpret_cast<fftw_complex*>(tmp.data()), out);
}

namespace {

std::shared_ptr<const RealFft::Plans> cached_plans(int n) {
  static std::map<int, std::shared_ptr<const RealFft::Plans>> cache;
  std::lock_guard<std::mutex> lock(RealFft::Plans::planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<RealFft::Plans>();
  std::vector<double> r(n);
  std::vector<cplx> c(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p->fwd = fftw_plan_dft_r2c_1d(n, r.data(), reinterpret_cast<fftw_complex*>(c.data()), flags);
  p->inv = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(c.data()), r.data(), flags);
  if (!p->fwd || !p->inv) throw std::runtime_error("FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

}  // namespace

int next_pow2(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  if (a.empty() || b.empty() || out_len == 0) return out;
  // Blocked overlap-add keeps transform sizes bounded for very long inputs.
  const std::vector<double>& longer = a.size() >= b.size() ? a : b;
  const std::vector<double>& shorter = a.size() >= b.size() ? b : a;
  const std::size_t want = std::min(longer.size(), std::max<std::size_t>(shorter.size(), 8192));
  const int fft_len = next_pow2(static_cast<int>(want + shorter.size() - 1));
  const std::size_t block = fft_len - shorter.size() + 1;
  RealFft fft(fft_len);
  std::vector<double> buf(fft_len);
  std::vector<cplx> kspec(fft.spectrum_size()), xspec(fft.spectrum_size());
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(shorter.begin(), shorter.end(), buf.begin());
  fft.forward(buf.data(), kspec.data());
  const double scale = 1.0 / fft_len;
  const std::size_t limit = std::min(longer.size(), out_len);
  for (std::size_t start = 0; start < limit; start += block) {
    const std::size_t len = std::min(block, longer.size() - start);
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(longer.begin() + start, longer.begin() + start + len, buf.begin());
    fft.forward(buf.data(), xspec.data());
    for (std::size_t f = 0; f < xspec.size(); ++f) xspec[f] *= kspec[f];
    fft.inverse(xspec.data(), buf.data());
    const std::size_t produced = len + shorter.size() - 1;
    for (std::size_t t = 0; t < produced && start + t < out_len; ++t)
      out[start + t] += buf[t] * scale;
  }
  return out;
}

}  // namespace memnet
