#pragma once

// Lindblad steady states of weakly driven systems and the swept homodyne response.
//
// Density matrices are vectorized column-first: vec(rho)[i + j d] = rho(i, j).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "pnr/errors.hpp"
#include "pnr/model.hpp"
#include "pnr/operators.hpp"

namespace pnr {

struct LindbladSystem {
  ComplexMatrix H_rot;
  std::vector<ComplexMatrix> collapse_ops;  // rates folded in
  HilbertDims dims{2};

  void validate() const {
    const std::size_t d = dims.total();
    if (!H_rot.is_square() || H_rot.rows() != d) {
      throw DimensionError("LindbladSystem: Hamiltonian " + H_rot.shape() + " vs total dimension " + std::to_string(d));
    }
    for (const auto& c : collapse_ops) {
      if (!c.is_square() || c.rows() != d) {
        throw DimensionError("LindbladSystem: collapse operator " + c.shape() + " vs total dimension " +
                             std::to_string(d));
      }
    }
  }
};

/// sqrt(gamma (1 + n_th)) a and sqrt(gamma n_th) a^dagger on mode `mode_index`.
inline std::vector<ComplexMatrix> collapse_ops(const ModeSpec& mode, std::size_t mode_index, const HilbertDims& dims) {
  if (!(mode.gamma >= 0.0) || !(mode.n_th >= 0.0)) throw DomainError("collapse_ops: gamma and n_th must be >= 0");
  std::vector<ComplexMatrix> out;
  if (mode.gamma == 0.0) return out;
  const ComplexMatrix a = embed(destroy(dims[mode_index]), mode_index, dims);
  out.push_back(std::sqrt(mode.gamma * (1.0 + mode.n_th)) * a);
  if (mode.n_th > 0.0) out.push_back(std::sqrt(mode.gamma * mode.n_th) * a.adjoint());
  return out;
}

inline std::vector<ComplexMatrix> collapse_ops(std::span<const ModeSpec> modes, const HilbertDims& dims) {
  if (modes.size() != dims.modes()) throw DimensionError("collapse_ops: one ModeSpec per mode required");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    auto ops = collapse_ops(modes[k], k, dims);
    out.insert(out.end(), std::make_move_iterator(ops.begin()), std::make_move_iterator(ops.end()));
  }
  return out;
}

struct LiouvillianOptions {
  /// Largest Hilbert-space dimension accepted; the superoperator has this squared rows.
  std::size_t max_dim = 128;
};

namespace detail {

inline void check_superoperator_size(std::size_t d, const LiouvillianOptions& opts) {
  if (d > opts.max_dim) {
    throw DimensionError("liouvillian: Hilbert dimension " + std::to_string(d) + " exceeds the limit " +
                         std::to_string(opts.max_dim) + " (superoperator would be " + std::to_string(d * d) +
                         " square)");
  }
}

/// -i (I (x) H - H^T (x) I)
inline ComplexMatrix commutator_superop(const ComplexMatrix& H) {
  const ComplexMatrix I = ComplexMatrix::identity(H.rows());
  return Complex(0.0, -1.0) * (kron(I, H) - kron(H.transpose(), I));
}

/// sum_k conj(C) (x) C - 1/2 I (x) C^dag C - 1/2 (C^dag C)^T (x) I
inline ComplexMatrix dissipator_superop(std::span<const ComplexMatrix> ops, std::size_t d) {
  const ComplexMatrix I = ComplexMatrix::identity(d);
  ComplexMatrix D = ComplexMatrix::zeros(d * d, d * d);
  for (const auto& c : ops) {
    const ComplexMatrix cdc = c.adjoint() * c;
    const ComplexMatrix conj_c = c.adjoint().transpose();
    D = D + kron(conj_c, c) - 0.5 * kron(I, cdc) - 0.5 * kron(cdc.transpose(), I);
  }
  return D;
}

}  // namespace detail

inline ComplexMatrix liouvillian(const LindbladSystem& sys, const LiouvillianOptions& opts = {}) {
  sys.validate();
  const std::size_t d = sys.dims.total();
  detail::check_superoperator_size(d, opts);
  return detail::commutator_superop(sys.H_rot) + detail::dissipator_superop(sys.collapse_ops, d);
}

inline ComplexVector vectorize(const ComplexMatrix& rho) {
  const DenseMatrix m = rho.to_dense();
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw DimensionError("unvectorize: length " + std::to_string(v.size()) + " is not square");
  return ComplexMatrix(DenseMatrix(Eigen::Map<const DenseMatrix>(v.data(), d, d)));
}

/// Applies a superoperator to rho.
inline ComplexMatrix apply_superop(const ComplexMatrix& L, const ComplexMatrix& rho) {
  if (L.cols() != rho.rows() * rho.cols()) throw DimensionError("apply_superop: size mismatch");
  return unvectorize(ComplexVector(L.to_sparse() * vectorize(rho)));
}

enum class SteadyStateMethod { automatic, direct, iterative };

struct SteadyStateOptions {
  SteadyStateMethod method = SteadyStateMethod::automatic;
  /// `automatic` switches to the iterative solver above this many superoperator rows.
  std::size_t iterative_threshold = 5000;
  /// Accepted residual ||L rho||_inf relative to ||L||_inf.
  double residual_tol = 1e-10;
  double iterative_tol = 1e-14;
  int max_iterations = 20000;
};

struct SteadyState {
  ComplexMatrix rho;
  double residual = 0.0;  // ||L rho||_inf / ||L||_inf
  bool iterative = false;
};

namespace detail {

inline double inf_norm(const SparseMatrix& L) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(L.rows());
  for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(L, k); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

/// L with row 0 replaced by scale * vec(I)^T, so the solution has trace 1.
inline SparseMatrix trace_replaced(const SparseMatrix& L, std::size_t d, double scale) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(L.nonZeros()) + d);
  for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(L, k); it; ++it) {
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (std::size_t i = 0; i < d; ++i) t.emplace_back(0, static_cast<Eigen::Index>(i + i * d), Complex(scale));
  SparseMatrix A(L.rows(), L.cols());
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

}  // namespace detail

/// Unique trace-one kernel vector of L.
inline SteadyState steady_state(const ComplexMatrix& L_in, const SteadyStateOptions& opts = {}) {
  if (!L_in.is_square()) throw DimensionError("steady_state: superoperator is not square");
  const SparseMatrix L = L_in.to_sparse();
  const auto n = static_cast<std::size_t>(L.rows());
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) throw DimensionError("steady_state: superoperator size " + std::to_string(n) + " is not d^2");

  const double scale = std::max(L_in.max_abs(), 1e-300);
  const SparseMatrix A = detail::trace_replaced(L, d, scale);
  ComplexVector rhs = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  rhs(0) = scale;

  const bool iterative = opts.method == SteadyStateMethod::iterative ||
                         (opts.method == SteadyStateMethod::automatic && n > opts.iterative_threshold);
  ComplexVector x;
  if (!iterative) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
      throw SolverError("steady_state: trace-constrained system is singular (steady state not unique): " +
                        lu.lastErrorMessage());
    }
    x = lu.solve(rhs);
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<Complex>> solver;
    solver.setTolerance(opts.iterative_tol);
    solver.setMaxIterations(opts.max_iterations);
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw SolverError("steady_state: preconditioner construction failed");
    x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
      throw SolverError("steady_state: iterative solve did not converge after " +
                            std::to_string(solver.iterations()) + " iterations",
                        solver.error());
    }
  }
  if (!x.allFinite()) throw SolverError("steady_state: solution is not finite (steady state not unique)");

  DenseMatrix rho = Eigen::Map<const DenseMatrix>(x.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();

  const ComplexVector v = Eigen::Map<const ComplexVector>(rho.data(), rho.size());
  const double l_norm = std::max(detail::inf_norm(L), 1e-300);
  const double residual = (L * v).cwiseAbs().maxCoeff() / l_norm;
  if (!(residual <= opts.residual_tol)) {
    throw SolverError("steady_state: residual " + std::to_string(residual) + " exceeds tolerance", residual);
  }
  return {ComplexMatrix(std::move(rho)), residual, iterative};
}

inline SteadyState steady_state(const LindbladSystem& sys, const SteadyStateOptions& opts = {},
                                const LiouvillianOptions& lopts = {}) {
  return steady_state(liouvillian(sys, lopts), opts);
}

/// <a + a^dag> and -i <a - a^dag> of mode `k`.
struct Quadratures {
  double re = 0.0;
  double im = 0.0;
};

inline Quadratures quadratures(const ComplexMatrix& rho, std::size_t k, const HilbertDims& dims) {
  const ComplexMatrix a = embed(destroy(dims[k]), k, dims);
  const ComplexMatrix ad = a.adjoint();
  return {expectation(rho, a + ad).real(), (Complex(0.0, -1.0) * expectation(rho, a - ad)).real()};
}

struct SpectrumResult {
  std::vector<double> omega_d_grid;
  std::vector<double> quadrature_re;
  std::vector<double> quadrature_im;
  std::vector<bool> converged;
  /// Failure message per non-converged grid index.
  std::map<std::size_t, std::string> failures;

  std::size_t size() const { return omega_d_grid.size(); }
  /// |<a>| = |quad_re + i quad_im| / 2.
  double magnitude(std::size_t i) const { return 0.5 * std::hypot(quadrature_re[i], quadrature_im[i]); }
  std::vector<double> magnitudes() const {
    std::vector<double> m(size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = magnitude(i);
    return m;
  }
};

struct SweepOptions {
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
  FrameOptions frame;
  SteadyStateOptions steady;
  LiouvillianOptions liouvillian;
};

/// Steady-state response of the driven mode at each drive frequency.
/// `drive.omega_d` is ignored; each grid value replaces it.
inline SpectrumResult spectrum_sweep(const SystemModel& model, const DriveSpec& drive, std::span<const double> grid,
                                     const SweepOptions& opts = {}) {
  if (grid.empty()) throw DomainError("spectrum_sweep: empty frequency grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("spectrum_sweep: grid must be sorted");
  if (!(drive.amplitude >= 0.0)) throw DomainError("spectrum_sweep: drive amplitude must be >= 0");
  if (drive.driven_mode >= model.dims.modes()) throw DimensionError("spectrum_sweep: driven mode out of range");
  const std::size_t d = model.dims.total();
  detail::check_superoperator_size(d, opts.liouvillian);

  const auto ops = collapse_ops(std::span<const ModeSpec>(model.modes), model.dims);
  const ComplexMatrix dissipator = detail::dissipator_superop(ops, d);
  // Secular projection and the drive term do not depend on omega_d.
  const ComplexMatrix H_static = rotating_frame(model.H, DriveSpec{drive.driven_mode, 0.0, drive.amplitude},
                                                model.dims, model.rotate_modes, opts.frame);
  const std::vector<double> n_rot = model.dims.number_diagonal(model.rotate_modes);
  const ComplexMatrix a = embed(destroy(model.dims[drive.driven_mode]), drive.driven_mode, model.dims);
  const ComplexMatrix x_op = a + a.adjoint();
  const ComplexMatrix p_op = Complex(0.0, -1.0) * (a - a.adjoint());

  SpectrumResult out;
  out.omega_d_grid.assign(grid.begin(), grid.end());
  out.quadrature_re.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  out.quadrature_im.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  out.converged.assign(grid.size(), false);
  std::vector<char> ok(grid.size(), 0);
  std::vector<std::string> messages(grid.size());

  auto solve_point = [&](std::size_t i) {
    try {
      std::vector<double> shift(n_rot.size());
      for (std::size_t s = 0; s < shift.size(); ++s) shift[s] = -grid[i] * n_rot[s];
      const ComplexMatrix H = H_static + ComplexMatrix::diagonal(shift);
      const SteadyState ss = steady_state(detail::commutator_superop(H) + dissipator, opts.steady);
      out.quadrature_re[i] = expectation(ss.rho, x_op).real();
      out.quadrature_im[i] = expectation(ss.rho, p_op).real();
      ok[i] = 1;
    } catch (const Error& e) {
      messages[i] = e.what();
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) solve_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) solve_point(i);
      });
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.converged[i] = ok[i] != 0;
    if (!ok[i]) out.failures.emplace(i, messages[i]);
  }
  return out;
}

inline std::vector<double> linspace(double start, double stop, std::size_t points) {
  if (points < 2) throw DomainError("linspace: need at least 2 points");
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return v;
}

/// A transition of the undriven system visible to a probe on the driven mode.
struct Transition {
  double omega = 0.0;   // E_final - E_initial, rad/s
  double weight = 0.0;  // p_initial |<final| a^dag |initial>|^2
};

/// Transitions |i> -> |j> adding one rotated excitation, weighted by the thermal
/// population of |i> in the undriven steady state. Weights below `rel_cutoff` x max are dropped.
inline std::vector<Transition> predicted_transitions(const SystemModel& model, double rel_cutoff = 1e-3,
                                                     const FrameOptions& frame = {}) {
  const ComplexMatrix H =
      rotating_frame(model.H, DriveSpec{model.driven_mode, 0.0, 0.0}, model.dims, model.rotate_modes, frame);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(H.to_dense());
  const DenseMatrix& V = eig.eigenvectors();
  const Eigen::VectorXd& E = eig.eigenvalues();

  LindbladSystem sys{H, collapse_ops(std::span<const ModeSpec>(model.modes), model.dims), model.dims};
  const DenseMatrix rho = steady_state(sys).rho.to_dense();
  const DenseMatrix pops = V.adjoint() * rho * V;
  const DenseMatrix ad = V.adjoint() * embed(create(model.dims[model.driven_mode]), model.driven_mode, model.dims)
                                           .to_dense() * V;

  std::vector<Transition> out;
  double wmax = 0.0;
  for (Eigen::Index i = 0; i < E.size(); ++i) {
    const double p = pops(i, i).real();
    for (Eigen::Index j = 0; j < E.size(); ++j) {
      const double w = p * std::norm(ad(j, i));
      if (w > 0.0) out.push_back({E(j) - E(i), w});
      wmax = std::max(wmax, w);
    }
  }
  std::erase_if(out, [&](const Transition& t) { return t.weight < rel_cutoff * wmax; });
  std::sort(out.begin(), out.end(), [](const Transition& x, const Transition& y) { return x.omega < y.omega; });
  return out;
}

/// Grid spanning all predicted transitions padded by `padding` thermal linewidths
/// (1 + 4 n_th) gamma of the driven mode.
inline std::vector<double> auto_grid(const SystemModel& model, std::size_t points = 401, double padding = 5.0) {
  const auto transitions = predicted_transitions(model);
  if (transitions.empty()) throw SolverError("auto_grid: probe sees no transitions");
  const ModeSpec& m = model.driven();
  double width = (1.0 + 4.0 * m.n_th) * m.gamma;
  if (!(width > 0.0)) width = 1e-6 * std::max(std::abs(transitions.back().omega), 1.0);
  return linspace(transitions.front().omega - padding * width, transitions.back().omega + padding * width, points);
}

struct Peak {
  std::size_t index = 0;
  double omega = 0.0;   // parabolic-refined position
  double height = 0.0;  // value at the refined position
};

/// Interior local maxima of `values` above `min_height`, refined by a parabola
/// through the three samples around each maximum. Sorted by descending height.
inline std::vector<Peak> detect_peaks(std::span<const double> grid, std::span<const double> values,
                                      double min_height = 0.0) {
  if (grid.size() != values.size()) throw DimensionError("detect_peaks: grid and values differ in length");
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2)) continue;
    if (!(y1 > y0 && y1 >= y2) || y1 < min_height) continue;
    Peak p{i, grid[i], y1};
    const double denom = y0 - 2.0 * y1 + y2;
    const double h = 0.5 * (grid[i + 1] - grid[i - 1]);
    if (denom < 0.0) {
      const double shift = 0.5 * (y0 - y2) / denom;
      p.omega = grid[i] + shift * h;
      p.height = y1 - 0.25 * (y0 - y2) * shift;
    }
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return peaks;
}

inline std::vector<Peak> detect_peaks(const SpectrumResult& r, double min_rel_height = 0.0) {
  const auto m = r.magnitudes();
  double top = 0.0;
  for (double v : m) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  return detect_peaks(r.omega_d_grid, m, min_rel_height * top);
}

}  // namespace pnr
