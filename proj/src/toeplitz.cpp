#include "memnet/toeplitz.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace memnet {

BlockToeplitz::BlockToeplitz(const Autocov& acv, int T)
    : n_(acv.dim()), T_(T), L_(next_pow2(std::max(2 * T - 1, 2))), acv_(acv), fft_(L_) {
  if (T < 1) throw DimensionMismatch("BlockToeplitz: T must be positive");
  acv.require_lag(T - 1, "BlockToeplitz");
  spec_.resize(static_cast<std::size_t>(n_) * n_);
  std::vector<double> c(L_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      std::fill(c.begin(), c.end(), 0.0);
      for (int u = 0; u < T; ++u) c[u] = acv[u](i, k);
      for (int u = 1; u < T; ++u) c[L_ - u] = acv[u](k, i);
      auto& s = spec_[static_cast<std::size_t>(i) * n_ + k];
      s.resize(fft_.spectrum_size());
      fft_.forward(c.data(), s.data());
    }
}

VectorXd BlockToeplitz::apply(const VectorXd& v) const {
  if (v.size() != size()) throw DimensionMismatch("bt_apply: vector length differs from N*T");
  const int nf = fft_.spectrum_size();
  std::vector<std::vector<cplx>> vs(n_, std::vector<cplx>(nf));
  std::vector<double> buf(L_);
  for (int k = 0; k < n_; ++k) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int t = 0; t < T_; ++t) buf[t] = v[static_cast<Eigen::Index>(k) * T_ + t];
    fft_.forward(buf.data(), vs[k].data());
  }
  VectorXd out(size());
  std::vector<cplx> acc(nf);
  const double scale = 1.0 / L_;
  for (int i = 0; i < n_; ++i) {
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    for (int k = 0; k < n_; ++k) {
      const auto& s = spec_[static_cast<std::size_t>(i) * n_ + k];
      const auto& x = vs[k];
      for (int f = 0; f < nf; ++f) acc[f] += s[f] * x[f];
    }
    fft_.inverse(acc.data(), buf.data());
    for (int t = 0; t < T_; ++t) out[static_cast<Eigen::Index>(i) * T_ + t] = buf[t] * scale;
  }
  return out;
}

MatrixXd BlockToeplitz::dense() const {
  MatrixXd S(size(), size());
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k)
      for (int t = 0; t < T_; ++t)
        for (int s = 0; s < T_; ++s)
          S(static_cast<Eigen::Index>(i) * T_ + t, static_cast<Eigen::Index>(k) * T_ + s) =
              acv_.entry(t - s, i, k);
  return S;
}

VectorXd bt_apply(const BlockToeplitz& op, const VectorXd& v) { return op.apply(v); }

namespace {

class Precond {
 public:
  virtual ~Precond() = default;
  virtual VectorXd apply(const VectorXd& r) const = 0;
};

class IdentityPrecond : public Precond {
 public:
  VectorXd apply(const VectorXd& r) const override { return r; }
};

class BlockJacobi : public Precond {
 public:
  BlockJacobi(const BlockToeplitz& op) : n_(op.N()), T_(op.T()), llt_(op.acv()[0]) {
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("block-Jacobi preconditioner: lag-0 block not positive definite",
                                0);
  }
  VectorXd apply(const VectorXd& r) const override {
    VectorXd out(r.size());
    VectorXd b(n_);
    for (int t = 0; t < T_; ++t) {
      for (int i = 0; i < n_; ++i) b[i] = r[static_cast<Eigen::Index>(i) * T_ + t];
      const VectorXd z = llt_.solve(b);
      for (int i = 0; i < n_; ++i) out[static_cast<Eigen::Index>(i) * T_ + t] = z[i];
    }
    return out;
  }

 private:
  int n_, T_;
  Eigen::LLT<MatrixXd> llt_;
};

// Strang-type block-circulant approximation, one Hermitian N x N system per
// frequency.
class BlockCirculant : public Precond {
 public:
  explicit BlockCirculant(const BlockToeplitz& op)
      : n_(op.N()), T_(op.T()), fft_(op.T()) {
    const Autocov& g = op.acv();
    const int nf = fft_.spectrum_size();
    std::vector<std::vector<cplx>> spec(static_cast<std::size_t>(n_) * n_,
                                        std::vector<cplx>(nf));
    std::vector<double> c(T_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        for (int u = 0; u < T_; ++u) {
          if (2 * u < T_) {
            c[u] = g.entry(u, i, k);
          } else if (2 * u > T_) {
            c[u] = g.entry(u - T_, i, k);
          } else {
            c[u] = 0.5 * (g.entry(u, i, k) + g.entry(-u, i, k));
          }
        }
        fft_.forward(c.data(), spec[static_cast<std::size_t>(i) * n_ + k].data());
      }
    llt_.reserve(nf);
    Eigen::MatrixXcd m(n_, n_);
    for (int f = 0; f < nf; ++f) {
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) m(i, k) = spec[static_cast<std::size_t>(i) * n_ + k][f];
      m = (0.5 * (m + m.adjoint())).eval();
      llt_.emplace_back(m);
      if (llt_.back().info() != Eigen::Success) {
        ok_ = false;
        return;
      }
      // Reject nearly singular frequencies as well.
      const auto diag = llt_.back().matrixLLT().diagonal().real();
      if (diag.minCoeff() <= 1e-10 * diag.maxCoeff()) {
        ok_ = false;
        return;
      }
    }
  }
  bool ok() const { return ok_; }

  VectorXd apply(const VectorXd& r) const override {
    const int nf = fft_.spectrum_size();
    std::vector<std::vector<cplx>> rs(n_, std::vector<cplx>(nf));
    for (int i = 0; i < n_; ++i) fft_.forward(r.data() + static_cast<Eigen::Index>(i) * T_, rs[i].data());
    Eigen::VectorXcd b(n_);
    for (int f = 0; f < nf; ++f) {
      for (int i = 0; i < n_; ++i) b[i] = rs[i][f];
      const Eigen::VectorXcd z = llt_[f].solve(b);
      for (int i = 0; i < n_; ++i) rs[i][f] = z[i];
    }
    VectorXd out(r.size());
    const double scale = 1.0 / T_;
    for (int i = 0; i < n_; ++i) {
      fft_.inverse(rs[i].data(), out.data() + static_cast<Eigen::Index>(i) * T_);
      out.segment(static_cast<Eigen::Index>(i) * T_, T_) *= scale;
    }
    return out;
  }

 private:
  int n_, T_;
  RealFft fft_;
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> llt_;
  bool ok_ = true;
};

}  // namespace

PcgResult pcg_solve(const BlockToeplitz& op, const VectorXd& x, const PcgOptions& opts) {
  if (x.size() != op.size()) throw DimensionMismatch("pcg: vector length differs from N*T");
  PcgResult res;
  std::unique_ptr<Precond> M;
  res.used = opts.preconditioner;
  if (opts.preconditioner == Preconditioner::circulant) {
    auto c = std::make_unique<BlockCirculant>(op);
    if (c->ok()) {
      M = std::move(c);
    } else {
      res.used = Preconditioner::block_jacobi;
    }
  }
  if (!M && res.used == Preconditioner::block_jacobi) M = std::make_unique<BlockJacobi>(op);
  if (!M) M = std::make_unique<IdentityPrecond>();

  const double xnorm = x.norm();
  res.solution = VectorXd::Zero(x.size());
  if (xnorm == 0.0) return res;
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 2 * static_cast<int>(x.size()) + 100;

  VectorXd r = x;
  VectorXd z = M->apply(r);
  VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const VectorXd q = op.apply(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0) || !std::isfinite(pq))
      throw NoConvergence("pcg: covariance operator is not positive definite", it);
    const double alpha = rz / pq;
    res.solution.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    res.iterations = it;
    res.rel_residual = r.norm() / xnorm;
    if (res.rel_residual <= opts.tol) {
      res.quadform = x.dot(res.solution);
      return res;
    }
    z = M->apply(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw NoConvergence("pcg: no convergence within " + std::to_string(max_iter) + " iterations",
                      max_iter);
}

PcgResult pcg_quadform(const BlockToeplitz& op, const VectorXd& x, const PcgOptions& opts) {
  return pcg_solve(op, x, opts);
}

}  // namespace memnet
