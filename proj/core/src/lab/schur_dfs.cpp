#include "schur_dfs.hpp"

#include "igr/error.hpp"

namespace igr::lab::detail {

namespace {

mpz_class lcm_denominators(const SchurDfs::Input& in) {
  mpz_class l = 1;
  auto take = [&](const Rational& r) { mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.value().get_den_mpz_t()); };
  for (Eigen::Index i = 0; i < in.sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < in.sigma.cols(); ++j) take(in.sigma(i, j));
  for (Eigen::Index i = 0; i < in.u.size(); ++i) take(in.u(i));
  for (const auto& c : in.extra)
    for (Eigen::Index i = 0; i < c.size(); ++i) take(c(i));
  return l;
}

mpz_class integral(const Rational& r, const mpz_class& scale) {
  mpq_class v = r.value() * mpq_class(scale);
  v.canonicalize();
  return v.get_num();
}

}  // namespace

SchurDfs::SchurDfs(const std::vector<Input>& inputs) {
  if (inputs.empty()) throw ValidationError("no matrices to walk");
  d_ = static_cast<int>(inputs[0].u.size());
  if (d_ > 63) throw ValidationError("subset walk supports d <= 63");
  n_ = static_cast<std::size_t>(d_) + 1;
  for (const auto& in : inputs) {
    if (in.sigma.rows() != d_ || in.u.size() != d_) throw ValidationError("matrices of different dimensions");
    Matrix m;
    m.scale = lcm_denominators(in);
    m.extras = in.extra.size();
    m.levels.resize(n_);
    for (auto& l : m.levels) {
      l.sym.resize(n_ * n_);
      l.ext.resize(n_ * m.extras);
    }
    Level& root = m.levels[0];
    for (int a = 0; a < d_; ++a) {
      for (int b = a; b < d_; ++b) s(root, a, b) = integral(in.sigma(a, b), m.scale);
      s(root, a, d_) = integral(in.u(a), m.scale);
      for (std::size_t t = 0; t < m.extras; ++t) x(root, t, a, m.extras) = integral(in.extra[t](a), m.scale);
    }
    s(root, d_, d_) = 0;
    for (std::size_t t = 0; t < m.extras; ++t) x(root, t, d_, m.extras) = 0;
    root.det = 1;
    mats_.push_back(std::move(m));
  }
  views_.resize(mats_.size());
}

void SchurDfs::run(const Visitor& visit) { descend(0, 0, 0, visit); }

void SchurDfs::descend(int depth, int start, std::uint64_t mask, const Visitor& visit) {
  for (int j = start; j < d_; ++j) {
    const std::uint64_t child_mask = mask | (std::uint64_t{1} << j);
    for (std::size_t mi = 0; mi < mats_.size(); ++mi) {
      Matrix& m = mats_[mi];
      Level& par = m.levels[static_cast<std::size_t>(depth)];
      Level& ch = m.levels[static_cast<std::size_t>(depth) + 1];
      const mpz_class& piv = s(par, j, j);
      const mpz_class& prev = par.det;
      // Rows/cols a, b > j plus the bordered index d.
      for (int a = j + 1; a <= d_; ++a) {
        const mpz_class& ma = s(par, j, a);
        for (int b = a; b <= d_; ++b) {
          mpz_mul(tmp_.get_mpz_t(), piv.get_mpz_t(), s(par, a, b).get_mpz_t());
          mpz_submul(tmp_.get_mpz_t(), ma.get_mpz_t(), s(par, j, b).get_mpz_t());
          mpz_divexact(s(ch, a, b).get_mpz_t(), tmp_.get_mpz_t(), prev.get_mpz_t());
        }
        for (std::size_t t = 0; t < m.extras; ++t) {
          mpz_mul(tmp_.get_mpz_t(), piv.get_mpz_t(), x(par, t, a, m.extras).get_mpz_t());
          mpz_submul(tmp_.get_mpz_t(), ma.get_mpz_t(), x(par, t, j, m.extras).get_mpz_t());
          mpz_divexact(x(ch, t, a, m.extras).get_mpz_t(), tmp_.get_mpz_t(), prev.get_mpz_t());
        }
      }
      ch.det = piv;
      if (sgn(ch.det) <= 0) throw NumericalError("leading principal minor is not positive; matrix is not positive definite");
      const mpz_class* ut = m.extras ? &x(ch, 0, d_, m.extras) : nullptr;
      views_[mi] = View{&s(ch, d_, d_), &ch.det, &m.scale, ut, m.extras};
    }
    visit(child_mask, views_);
    if (j + 1 < d_) descend(depth + 1, j + 1, child_mask, visit);
  }
}

}  // namespace igr::lab::detail
