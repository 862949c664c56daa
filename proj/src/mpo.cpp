// Copyright 2026 The chainfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chainfactor/mpo.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "chainfactor/errors.hpp"

namespace chainfactor {

namespace {

constexpr double kSingularCutoff = 1e-12;  // relative to the top value

struct ThinSvd {
  Matrix u;
  RealVector s;  // descending
  Matrix v;      // m = u * s.asDiagonal() * v.adjoint()
};

template <class Mat>
void svd_impl(const Mat& m, Mat& u, RealVector& s, Mat& v) {
  const long rows = m.rows(), cols = m.cols();
  if (rows >= 4 * cols) {
    // QR first: the factor passed to the divide-and-conquer solver stays
    // square, which is what dominates the sweep at the largest cut
    Eigen::HouseholderQR<Mat> qr(m);
    const Mat q = qr.householderQ() * Mat::Identity(rows, cols);
    const Mat r = qr.matrixQR()
                      .topRows(cols)
                      .template triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Mat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = q * svd.matrixU();
    s = svd.singularValues();
    v = svd.matrixV();
    return;
  }
  if (cols >= 4 * rows) {
    Mat tu, tv;
    const Mat flipped = m.adjoint();
    svd_impl<Mat>(flipped, tv, s, tu);
    u = tu;
    v = tv;
    return;
  }
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = svd.matrixU();
  s = svd.singularValues();
  v = svd.matrixV();
}

ThinSvd thin_svd(const Matrix& m) {
  if (detail::is_numerically_real(m)) {
    Eigen::MatrixXd u, v;
    RealVector s;
    const Eigen::MatrixXd mr = m.real();
    svd_impl<Eigen::MatrixXd>(mr, u, s, v);
    return {u.cast<Complex>(), s, v.cast<Complex>()};
  }
  ThinSvd out;
  svd_impl<Matrix>(m, out.u, out.s, out.v);
  return out;
}

long kept_rank(const RealVector& s) {
  if (s.size() == 0) return 1;
  const double top = s(0);
  if (!(top > 0.0)) return 1;
  long k = 0;
  for (long i = 0; i < s.size(); ++i)
    if (s(i) >= top * kSingularCutoff) ++k;
  return std::max<long>(1, k);
}

// permutation helpers between the stored layout [l x (xy, r)] and the
// unfoldings the sweep factorizes

Matrix fold_left(const Matrix& t, long l, long d2, long r) {
  // [(l, xy) x r]
  Matrix m(l * d2, r);
  for (long a = 0; a < l; ++a)
    for (long xy = 0; xy < d2; ++xy)
      for (long b = 0; b < r; ++b) m(a * d2 + xy, b) = t(a, xy * r + b);
  return m;
}

Matrix unfold_left(const Matrix& m, long l, long d2, long k) {
  Matrix t(l, d2 * k);
  for (long a = 0; a < l; ++a)
    for (long xy = 0; xy < d2; ++xy)
      for (long b = 0; b < k; ++b) t(a, xy * k + b) = m(a * d2 + xy, b);
  return t;
}

void check_chain(const std::vector<RecoveryKernel>& kernels, long first_dim) {
  for (size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].side != AttachSide::right)
      throw ArgumentError("tensor export expects a rightward chain");
    const long expect = i == 0 ? first_dim : kernels[i - 1].attached_dim;
    if (kernels[i].base_dim != expect)
      throw ArgumentError("kernel " + std::to_string(i) +
                          " does not extend the block before it");
  }
}

}  // namespace

MpoState mpo_export(const std::vector<RecoveryKernel>& kernels,
                    const DensityMatrix& rho_first) {
  const long d0 = rho_first.space().total_dim();
  check_chain(kernels, d0);

  const int nb = static_cast<int>(kernels.size()) + 1;
  std::vector<long> bdim(nb);
  bdim[0] = d0;
  for (int i = 0; i + 1 < nb; ++i) bdim[i + 1] = kernels[i].attached_dim;

  std::vector<Matrix> t(nb);
  std::vector<long> ld(nb, 1), rd(nb, 1);

  if (kernels.empty()) {
    const Matrix& m = rho_first.matrix();
    t[0] = Matrix(1, d0 * d0);
    for (long x = 0; x < d0; ++x)
      for (long y = 0; y < d0; ++y) t[0](0, x * d0 + y) = m(x, y);
  } else {
    // first site: the head marginal folded through kernel 0. With K indexed
    // by (base row, attached row) against (base column, contraction), the
    // tensor is sum_{a,b,c} rho[a,b] K[x,a';a,c] conj(K[y,b';b,c]) and the
    // cut carries (a', b').
    {
      const Matrix& k = kernels[0].kraus;
      const long d = bdim[0], e = bdim[1];
      Matrix perm(d * e * e, d);  // [(x, a', c) x a]
      for (long x = 0; x < d; ++x)
        for (long ap = 0; ap < e; ++ap)
          for (long c = 0; c < e; ++c)
            for (long a = 0; a < d; ++a)
              perm((x * e + ap) * e + c, a) = k(x * e + ap, a * e + c);
      const Matrix half = detail::prod(perm, rho_first.matrix());
      Matrix mixed(d * e, d * e);  // [(x, a') x (b, c)]
      for (long x = 0; x < d; ++x)
        for (long ap = 0; ap < e; ++ap)
          for (long b = 0; b < d; ++b)
            for (long c = 0; c < e; ++c)
              mixed(x * e + ap, b * e + c) = half((x * e + ap) * e + c, b);
      const Matrix raw = detail::prod(mixed, Matrix(k.adjoint()));
      t[0] = Matrix(1, d * d * e * e);
      for (long x = 0; x < d; ++x)
        for (long y = 0; y < d; ++y)
          for (long ap = 0; ap < e; ++ap)
            for (long bp = 0; bp < e; ++bp)
              t[0](0, (x * d + y) * e * e + ap * e + bp) =
                  raw(x * e + ap, y * e + bp);
      rd[0] = e * e;
    }
    // middle sites: kernel i alone, its contraction index closed in place
    for (int i = 1; i + 1 < nb; ++i) {
      const Matrix& k = kernels[i].kraus;
      const long d = bdim[i], e = bdim[i + 1];
      Matrix perm(d * d * e, e);  // [(a, x, a') x c]
      for (long a = 0; a < d; ++a)
        for (long x = 0; x < d; ++x)
          for (long ap = 0; ap < e; ++ap)
            for (long c = 0; c < e; ++c)
              perm((a * d + x) * e + ap, c) = k(x * e + ap, a * e + c);
      const Matrix raw = detail::prod(perm, Matrix(perm.adjoint()));
      t[i] = Matrix(d * d, d * d * e * e);
      for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b)
          for (long x = 0; x < d; ++x)
            for (long y = 0; y < d; ++y)
              for (long ap = 0; ap < e; ++ap)
                for (long bp = 0; bp < e; ++bp)
                  t[i](a * d + b, (x * d + y) * e * e + ap * e + bp) =
                      raw((a * d + x) * e + ap, (b * d + y) * e + bp);
      ld[i] = d * d;
      rd[i] = e * e;
    }
    // last site: the cut indices become the physical ones
    const long e = bdim[nb - 1];
    t[nb - 1] = Matrix::Identity(e * e, e * e);
    ld[nb - 1] = e * e;
  }

  // left-to-right pass orthogonalizes, right-to-left pass truncates what the
  // chain never populates; both keep the product exact to the cutoff
  for (int i = 0; i + 1 < nb; ++i) {
    const long d2 = bdim[i] * bdim[i];
    const ThinSvd svd = thin_svd(fold_left(t[i], ld[i], d2, rd[i]));
    const long k = kept_rank(svd.s);
    t[i] = unfold_left(svd.u.leftCols(k), ld[i], d2, k);
    const Matrix carry = svd.s.head(k).asDiagonal() *
                         svd.v.leftCols(k).adjoint();
    t[i + 1] = detail::prod(carry, t[i + 1]);
    rd[i] = k;
    ld[i + 1] = k;
  }
  for (int i = nb - 1; i > 0; --i) {
    const ThinSvd svd = thin_svd(t[i]);  // stored layout is [l x (xy, r)]
    const long k = kept_rank(svd.s);
    t[i] = svd.v.leftCols(k).adjoint();
    const Matrix carry =
        svd.u.leftCols(k) * svd.s.head(k).asDiagonal();  // [l x k]
    const long d2 = bdim[i - 1] * bdim[i - 1];
    const long old_r = rd[i - 1];
    Matrix folded(ld[i - 1], d2 * k);
    for (long xy = 0; xy < d2; ++xy)
      folded.middleCols(xy * k, k) =
          detail::prod(t[i - 1].middleCols(xy * old_r, old_r), carry);
    t[i - 1] = std::move(folded);
    ld[i] = k;
    rd[i - 1] = k;
  }

  MpoState out;
  out.tensors = std::move(t);
  for (int i = 0; i < nb; ++i)
    out.block_dims.push_back(static_cast<int>(bdim[i]));
  for (int i = 0; i + 1 < nb; ++i)
    out.bond_dims.push_back(static_cast<int>(rd[i]));
  return out;
}

DensityMatrix mpo_contract(const MpoState& mpo) {
  const int nb = mpo.blocks();
  if (nb == 0) throw ArgumentError("empty tensor chain");
  if (static_cast<int>(mpo.block_dims.size()) != nb ||
      static_cast<int>(mpo.bond_dims.size()) != nb - 1)
    throw ArgumentError("tensor chain bookkeeping is inconsistent");
  long total = 1;
  for (int d : mpo.block_dims) {
    if (d < 1) throw ArgumentError("block dimensions must be positive");
    total *= d;
    if (total > tol::max_total_dim)
      throw ResourceError("contraction dimension " + std::to_string(total) +
                          " exceeds the dense limit " +
                          std::to_string(tol::max_total_dim));
  }
  for (int i = 0; i < nb; ++i) {
    const long l = i == 0 ? 1 : mpo.bond_dims[i - 1];
    const long r = i == nb - 1 ? 1 : mpo.bond_dims[i];
    const long d = mpo.block_dims[i];
    if (mpo.tensors[i].rows() != l || mpo.tensors[i].cols() != d * d * r)
      throw ArgumentError("tensor " + std::to_string(i) +
                          " does not match the declared dimensions");
  }

  Matrix acc = Matrix::Ones(1, 1);
  long grown = 1;
  for (int i = 0; i < nb; ++i) {
    const long d = mpo.block_dims[i];
    const long r = i == nb - 1 ? 1 : mpo.bond_dims[i];
    const Matrix m = detail::prod(acc, mpo.tensors[i]);
    Matrix next(grown * d * grown * d, r);
    for (long bx = 0; bx < grown; ++bx)
      for (long by = 0; by < grown; ++by)
        for (long x = 0; x < d; ++x)
          for (long y = 0; y < d; ++y)
            for (long b = 0; b < r; ++b)
              next((bx * d + x) * grown * d + by * d + y, b) =
                  m(bx * grown + by, (x * d + y) * r + b);
    acc = std::move(next);
    grown *= d;
  }

  Matrix dense(grown, grown);
  for (long x = 0; x < grown; ++x)
    for (long y = 0; y < grown; ++y) dense(x, y) = acc(x * grown + y, 0);
  return DensityMatrix(SiteSpace(mpo.block_dims), dense);
}

void write_mpo(std::ostream& out, const MpoState& mpo) {
  out << "chainfactor-mpo 1\n";
  out << "blocks " << mpo.blocks() << "\n";
  out << "dims";
  for (int d : mpo.block_dims) out << ' ' << d;
  out << "\nbonds";
  for (int b : mpo.bond_dims) out << ' ' << b;
  out << "\n" << std::setprecision(17);
  for (int i = 0; i < mpo.blocks(); ++i) {
    const Matrix& t = mpo.tensors[i];
    out << "tensor " << i << ' ' << t.rows() << ' ' << t.cols() << "\n";
    for (long r = 0; r < t.rows(); ++r) {
      for (long c = 0; c < t.cols(); ++c) {
        if (c) out << ' ';
        out << t(r, c).real() << ' ' << t(r, c).imag();
      }
      out << "\n";
    }
  }
}

MpoState read_mpo(std::istream& in) {
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "chainfactor-mpo" || version != 1)
    throw ArgumentError("not a tensor chain file");
  int nb = 0;
  if (!(in >> word >> nb) || word != "blocks" || nb < 1)
    throw ArgumentError("bad block count");
  MpoState mpo;
  if (!(in >> word) || word != "dims")
    throw ArgumentError("missing block dimensions");
  for (int i = 0; i < nb; ++i) {
    int d = 0;
    if (!(in >> d) || d < 1) throw ArgumentError("bad block dimension");
    mpo.block_dims.push_back(d);
  }
  if (!(in >> word) || word != "bonds")
    throw ArgumentError("missing bond dimensions");
  for (int i = 0; i + 1 < nb; ++i) {
    int b = 0;
    if (!(in >> b) || b < 1) throw ArgumentError("bad bond dimension");
    mpo.bond_dims.push_back(b);
  }
  for (int i = 0; i < nb; ++i) {
    int idx = 0;
    long rows = 0, cols = 0;
    if (!(in >> word >> idx >> rows >> cols) || word != "tensor" || idx != i ||
        rows < 1 || cols < 1)
      throw ArgumentError("bad tensor header");
    const long l = i == 0 ? 1 : mpo.bond_dims[i - 1];
    const long r = i == nb - 1 ? 1 : mpo.bond_dims[i];
    const long d = mpo.block_dims[i];
    if (rows != l || cols != d * d * r)
      throw ArgumentError("tensor dimensions disagree with the header");
    Matrix t(rows, cols);
    for (long rr = 0; rr < rows; ++rr)
      for (long cc = 0; cc < cols; ++cc) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw ArgumentError("truncated tensor data");
        t(rr, cc) = Complex(re, im);
      }
    mpo.tensors.push_back(std::move(t));
  }
  return mpo;
}

}  // namespace chainfactor
