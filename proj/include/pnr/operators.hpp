#pragma once

// Truncated Fock-space operator algebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pnr/errors.hpp"

namespace pnr {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using ComplexVector = Eigen::VectorXcd;

/// Matrices with more rows than this are stored sparse.
inline constexpr std::size_t kSparseThreshold = 64;

/// Ordered per-mode truncation sizes. Mode 0 is the leftmost Kronecker factor.
class HilbertDims {
 public:
  HilbertDims(std::initializer_list<std::size_t> dims) : HilbertDims(std::vector<std::size_t>(dims)) {}
  explicit HilbertDims(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DomainError("HilbertDims: at least one mode is required");
    for (std::size_t n : dims_) {
      if (n < 2) throw DomainError("HilbertDims: invalid truncation " + std::to_string(n) + " (need N >= 2)");
    }
  }

  std::size_t modes() const { return dims_.size(); }
  std::size_t operator[](std::size_t k) const { return dims_.at(k); }
  std::span<const std::size_t> sizes() const { return dims_; }

  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t n : dims_) t *= n;
    return t;
  }

  /// Fock number of mode `k` in the product basis state `flat`.
  std::size_t occupation(std::size_t flat, std::size_t k) const {
    std::size_t stride = 1;
    for (std::size_t j = dims_.size(); j-- > k + 1;) stride *= dims_[j];
    return (flat / stride) % dims_.at(k);
  }

  /// Diagonal of sum_k n_k over the listed modes, in the product basis.
  std::vector<double> number_diagonal(std::span<const std::size_t> modes) const {
    std::vector<double> diag(total(), 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i) {
      for (std::size_t k : modes) diag[i] += static_cast<double>(occupation(i, k));
    }
    return diag;
  }

  bool operator==(const HilbertDims&) const = default;

 private:
  std::vector<std::size_t> dims_;
};

/// Complex matrix with size-dependent storage: dense up to kSparseThreshold rows,
/// sparse above. Values are immutable once built.
class ComplexMatrix {
 public:
  ComplexMatrix() : storage_(DenseMatrix(0, 0)) {}
  ComplexMatrix(DenseMatrix m) { assign(std::move(m)); }    // NOLINT(google-explicit-constructor)
  ComplexMatrix(SparseMatrix m) { assign(std::move(m)); }   // NOLINT(google-explicit-constructor)

  static ComplexMatrix identity(std::size_t n) {
    if (n > kSparseThreshold) {
      SparseMatrix s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      s.setIdentity();
      return ComplexMatrix(std::move(s));
    }
    return ComplexMatrix(DenseMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) {
    if (rows > kSparseThreshold) {
      return ComplexMatrix(SparseMatrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
    }
    return ComplexMatrix(DenseMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    SparseMatrix s(n, n);
    s.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Eigen::Index i = 0; i < n; ++i) s.insert(i, i) = values[static_cast<std::size_t>(i)];
    s.makeCompressed();
    return ComplexMatrix(std::move(s));
  }

  std::size_t rows() const {
    return std::visit([](const auto& m) { return static_cast<std::size_t>(m.rows()); }, storage_);
  }
  std::size_t cols() const {
    return std::visit([](const auto& m) { return static_cast<std::size_t>(m.cols()); }, storage_);
  }
  bool is_square() const { return rows() == cols(); }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }

  DenseMatrix to_dense() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return *d;
    return DenseMatrix(std::get<SparseMatrix>(storage_));
  }

  SparseMatrix to_sparse() const {
    if (const auto* s = std::get_if<SparseMatrix>(&storage_)) return *s;
    SparseMatrix s = std::get<DenseMatrix>(storage_).sparseView(Complex(0.0), 0.0);
    s.makeCompressed();
    return s;
  }

  Complex operator()(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return (*d)(r, c);
    return std::get<SparseMatrix>(storage_).coeff(r, c);
  }

  ComplexMatrix adjoint() const {
    return std::visit([](const auto& m) { return ComplexMatrix(std::decay_t<decltype(m)>(m.adjoint())); }, storage_);
  }

  ComplexMatrix transpose() const {
    return std::visit([](const auto& m) { return ComplexMatrix(std::decay_t<decltype(m)>(m.transpose())); }, storage_);
  }

  Complex trace() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return d->trace();
    const auto& s = std::get<SparseMatrix>(storage_);
    Complex t = 0.0;
    for (Eigen::Index i = 0; i < std::min(s.rows(), s.cols()); ++i) t += s.coeff(i, i);
    return t;
  }

  double frobenius_norm() const {
    return std::visit([](const auto& m) { return m.norm(); }, storage_);
  }

  double max_abs() const {
    if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return d->size() ? d->cwiseAbs().maxCoeff() : 0.0;
    double m = 0.0;
    const auto& s = std::get<SparseMatrix>(storage_);
    for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(s, k); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
  }

  /// ||M - M^dagger||_F <= rel_tol * max(||M||_F, 1e-300).
  bool is_hermitian(double rel_tol = 1e-12) const {
    if (!is_square()) return false;
    const double diff = (*this - adjoint()).frobenius_norm();
    return diff <= rel_tol * std::max(frobenius_norm(), 1e-300);
  }

  ComplexMatrix operator+(const ComplexMatrix& o) const { return combine(o, 1.0); }
  ComplexMatrix operator-(const ComplexMatrix& o) const { return combine(o, -1.0); }
  ComplexMatrix operator-() const { return (*this) * Complex(-1.0); }

  ComplexMatrix operator*(const ComplexMatrix& o) const {
    if (cols() != o.rows()) {
      throw DimensionError("matrix product: " + shape() + " * " + o.shape());
    }
    if (rows() > kSparseThreshold || o.cols() > kSparseThreshold) {
      SparseMatrix r = to_sparse() * o.to_sparse();
      r.prune(Complex(0.0));
      return ComplexMatrix(std::move(r));
    }
    return ComplexMatrix(DenseMatrix(to_dense() * o.to_dense()));
  }

  ComplexMatrix operator*(Complex s) const {
    return std::visit([s](const auto& m) { return ComplexMatrix(std::decay_t<decltype(m)>(m * s)); }, storage_);
  }
  ComplexMatrix operator*(double s) const { return (*this) * Complex(s); }
  friend ComplexMatrix operator*(Complex s, const ComplexMatrix& m) { return m * s; }
  friend ComplexMatrix operator*(double s, const ComplexMatrix& m) { return m * Complex(s); }

  /// Keeps only entries (i, j) with keep(i, j) true.
  template <typename Predicate>
  ComplexMatrix filtered(Predicate keep) const {
    SparseMatrix s = to_sparse();
    s.prune([&](Eigen::Index i, Eigen::Index j, const Complex&) {
      return keep(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    });
    return ComplexMatrix(std::move(s));
  }

  std::string shape() const { return std::to_string(rows()) + "x" + std::to_string(cols()); }

 private:
  void assign(DenseMatrix m) {
    if (static_cast<std::size_t>(m.rows()) > kSparseThreshold) {
      SparseMatrix s = m.sparseView(Complex(0.0), 0.0);
      s.makeCompressed();
      storage_ = std::move(s);
    } else {
      storage_ = std::move(m);
    }
  }

  void assign(SparseMatrix m) {
    if (static_cast<std::size_t>(m.rows()) > kSparseThreshold) {
      m.makeCompressed();
      storage_ = std::move(m);
    } else {
      storage_ = DenseMatrix(m);
    }
  }

  ComplexMatrix combine(const ComplexMatrix& o, double sign) const {
    if (rows() != o.rows() || cols() != o.cols()) {
      throw DimensionError("matrix sum: " + shape() + " vs " + o.shape());
    }
    if (is_sparse() || o.is_sparse()) {
      SparseMatrix r = to_sparse() + Complex(sign) * o.to_sparse();
      r.prune(Complex(0.0));
      return ComplexMatrix(std::move(r));
    }
    return ComplexMatrix(DenseMatrix(std::get<DenseMatrix>(storage_) + sign * std::get<DenseMatrix>(o.storage_)));
  }

  std::variant<DenseMatrix, SparseMatrix> storage_;
};

/// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  const SparseMatrix sa = a.to_sparse();
  const SparseMatrix sb = b.to_sparse();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(sa.nonZeros() * sb.nonZeros()));
  for (Eigen::Index ka = 0; ka < sa.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(sa, ka); ia; ++ia) {
      for (Eigen::Index kb = 0; kb < sb.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(sb, kb); ib; ++ib) {
          triplets.emplace_back(ia.row() * sb.rows() + ib.row(), ia.col() * sb.cols() + ib.col(),
                                ia.value() * ib.value());
        }
      }
    }
  }
  SparseMatrix r(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  r.setFromTriplets(triplets.begin(), triplets.end());
  return ComplexMatrix(std::move(r));
}

/// Bosonic lowering operator on a Fock space truncated to N levels.
inline ComplexMatrix destroy(std::size_t N) {
  if (N < 2) throw DomainError("destroy: invalid truncation " + std::to_string(N) + " (need N >= 2)");
  const auto n = static_cast<Eigen::Index>(N);
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return ComplexMatrix(std::move(a));
}

inline ComplexMatrix create(std::size_t N) { return destroy(N).adjoint(); }

inline ComplexMatrix number(std::size_t N) {
  if (N < 2) throw DomainError("number: invalid truncation " + std::to_string(N) + " (need N >= 2)");
  std::vector<double> diag(N);
  for (std::size_t k = 0; k < N; ++k) diag[k] = static_cast<double>(k);
  return ComplexMatrix::diagonal(diag);
}

/// I (x) ... (x) op (x) ... (x) I with op on `mode_index`.
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t mode_index, const HilbertDims& dims) {
  if (mode_index >= dims.modes()) {
    throw DimensionError("embed: mode index " + std::to_string(mode_index) + " out of range for " +
                         std::to_string(dims.modes()) + " modes");
  }
  if (!op.is_square() || op.rows() != dims[mode_index]) {
    throw DimensionError("embed: operator " + op.shape() + " does not match mode size " +
                         std::to_string(dims[mode_index]));
  }
  ComplexMatrix result = mode_index == 0 ? op : ComplexMatrix::identity(dims[0]);
  for (std::size_t k = 1; k < dims.modes(); ++k) {
    result = kron(result, k == mode_index ? op : ComplexMatrix::identity(dims[k]));
  }
  return result;
}

/// tr(rho * op). Warns when tr(rho) deviates from 1 by more than 1e-8.
inline Complex expectation(const ComplexMatrix& rho, const ComplexMatrix& op) {
  if (!rho.is_square() || !op.is_square() || rho.rows() != op.rows()) {
    throw DimensionError("expectation: rho " + rho.shape() + " vs operator " + op.shape());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "expectation: density matrix trace " << tr.real() << std::showpos << tr.imag() << "i differs from 1";
    warn(msg.str());
  }
  // tr(rho op) = sum_ij rho_ij op_ji
  const SparseMatrix s = op.to_sparse();
  const DenseMatrix r = rho.to_dense();
  Complex acc = 0.0;
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) acc += r(it.col(), it.row()) * it.value();
  }
  return acc;
}

/// Thermal state of a single truncated mode. Populations p_n ~ (n/(1+n))^k, renormalized.
inline ComplexMatrix thermal_state(std::size_t N, double n_th) {
  if (N < 2) throw DomainError("thermal_state: invalid truncation " + std::to_string(N));
  if (n_th < 0.0) throw DomainError("thermal_state: negative occupation");
  std::vector<double> p(N, 0.0);
  const double ratio = n_th / (1.0 + n_th);
  double norm = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    p[k] = std::pow(ratio, static_cast<double>(k));
    norm += p[k];
  }
  for (double& v : p) v /= norm;
  return ComplexMatrix::diagonal(p);
}

struct DensityMatrixCheck {
  double hermiticity_error = 0.0;  // ||rho - rho^dagger||_F
  Complex trace = 0.0;
  double min_eigenvalue = 0.0;

  /// Hermitian to `herm_tol`, trace 1 to `trace_tol`, eigenvalues >= -psd_tol * trace.
  bool valid(double herm_tol = 1e-10, double trace_tol = 1e-8, double psd_tol = 1e-10) const {
    return hermiticity_error <= herm_tol && std::abs(trace - 1.0) <= trace_tol &&
           min_eigenvalue >= -psd_tol * trace.real();
  }
};

inline DensityMatrixCheck check_density_matrix(const ComplexMatrix& rho) {
  if (!rho.is_square()) throw DimensionError("check_density_matrix: non-square " + rho.shape());
  DensityMatrixCheck out;
  const DenseMatrix d = rho.to_dense();
  out.hermiticity_error = (d - d.adjoint()).norm();
  out.trace = d.trace();
  const DenseMatrix herm = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

}  // namespace pnr
