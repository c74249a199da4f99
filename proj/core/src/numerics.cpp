#include "ggc/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>

namespace ggc {

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  double scale = m.norm();
  double dev = (m - m.adjoint()).norm();
  return dev <= tol * std::max(scale, 1.0);
}

EigDecomp hermitian_eig(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw NotHermitian("hermitian_eig: matrix is not square");
  }
  if (!is_hermitian(m, tol)) {
    throw NotHermitian("hermitian_eig: ||M - M^H|| exceeds tol * ||M||");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("hermitian_eig: eigensolver did not converge");
  }
  const int n = static_cast<int>(m.rows());
  EigDecomp out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order; the contract here is descending.
  for (int i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

CMatrix pseudoinverse(const CMatrix& m, double rank_tol) {
  if (m.size() == 0) return CMatrix(m.cols(), m.rows());
  if (m.norm() == 0.0) return CMatrix::Zero(m.cols(), m.rows());
  if (is_hermitian(m, 1e-12)) {
    EigDecomp eig = hermitian_eig(m, 1e-9);
    double cutoff = rank_tol * eig.values.cwiseAbs().maxCoeff();
    RVector inv = RVector::Zero(eig.values.size());
    for (int i = 0; i < eig.values.size(); ++i) {
      if (std::abs(eig.values[i]) > cutoff) inv[i] = 1.0 / eig.values[i];
    }
    return eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double cutoff = rank_tol * svd.singularValues().maxCoeff();
  RVector inv = RVector::Zero(svd.singularValues().size());
  for (int i = 0; i < inv.size(); ++i) {
    if (svd.singularValues()[i] > cutoff) inv[i] = 1.0 / svd.singularValues()[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

RMatrix pseudoinverse(const RMatrix& m, double rank_tol) {
  if (m.size() == 0) return RMatrix(m.cols(), m.rows());
  if (m.norm() == 0.0) return RMatrix::Zero(m.cols(), m.rows());
  if (m.rows() == m.cols() &&
      (m - m.transpose()).norm() <= 1e-12 * std::max(1.0, m.norm())) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es((m + m.transpose()) / 2.0);
    double cutoff = rank_tol * es.eigenvalues().cwiseAbs().maxCoeff();
    RVector inv = RVector::Zero(es.eigenvalues().size());
    for (int i = 0; i < inv.size(); ++i) {
      if (std::abs(es.eigenvalues()[i]) > cutoff) {
        inv[i] = 1.0 / es.eigenvalues()[i];
      }
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }
  return pseudoinverse(CMatrix(m.cast<Complex>()), rank_tol).real();
}

namespace {

template <typename Svd>
CVector svd_min_norm(const Svd& svd, const CVector& b, double rank_tol) {
  double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  if (smax == 0.0) return CVector::Zero(svd.matrixV().rows());
  double cutoff = rank_tol * smax;
  CVector c = svd.matrixU().adjoint() * b;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > cutoff) {
      c[i] /= svd.singularValues()[i];
    } else {
      c[i] = 0.0;
    }
  }
  return svd.matrixV() * c;
}

}  // namespace

CVector min_norm_solve(const CMatrix& a, const CVector& b, double rank_tol) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("min_norm_solve: A rows != b size");
  }
  if (a.size() == 0) return CVector::Zero(a.cols());
  // BDC is much faster on larger systems; Jacobi is sturdier on tiny ones.
  if (std::max(a.rows(), a.cols()) > 48) {
    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd_min_norm(svd, b, rank_tol);
  }
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd_min_norm(svd, b, rank_tol);
}

namespace {

template <typename Svd>
RVector svd_min_norm_real(const Svd& svd, const RVector& b, double rank_tol) {
  double smax = svd.singularValues().size() ? svd.singularValues().maxCoeff() : 0.0;
  if (smax == 0.0) return RVector::Zero(svd.matrixV().rows());
  double cutoff = rank_tol * smax;
  RVector c = svd.matrixU().transpose() * b;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > cutoff) {
      c[i] /= svd.singularValues()[i];
    } else {
      c[i] = 0.0;
    }
  }
  return svd.matrixV() * c;
}

}  // namespace

RVector min_norm_solve(const RMatrix& a, const RVector& b, double rank_tol) {
  if (a.rows() != b.size()) {
    throw DimensionMismatch("min_norm_solve: A rows != b size");
  }
  if (a.size() == 0) return RVector::Zero(a.cols());
  if (std::max(a.rows(), a.cols()) > 48) {
    Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd_min_norm_real(svd, b, rank_tol);
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd_min_norm_real(svd, b, rank_tol);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix random_cmatrix(Rng& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

CMatrix random_hermitian(Rng& rng, int n) {
  CMatrix m = random_cmatrix(rng, n, n);
  return (m + m.adjoint()) / 2.0;
}

CMatrix random_unitary(Rng& rng, int n) {
  CMatrix m = random_cmatrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  // Fix phases so the draw does not depend on Eigen's internal sign choices.
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    Complex d = r(i, i);
    double a = std::abs(d);
    q.col(i) *= (a > 0) ? d / a : Complex(1, 0);
  }
  return q;
}

CVector random_cvector(Rng& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return v;
}

RVector random_rvector(Rng& rng, int n) {
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace ggc
