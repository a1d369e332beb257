#pragma once

#include <complex>
#include <vector>

#include "gaas/matrix.hpp"

namespace gaas::numerics {

struct SymEigResult {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(k) pairs with values[k]
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Throws NonSquare, or NotSymmetric when the relative asymmetry exceeds 1e-12.
SymEigResult sym_eig(const Matrix& a);

/// Largest singular value, sqrt(lambda_max(A^T A)).
double spectral_norm(const Matrix& a);

/// Eigenvalues of a general real matrix (balancing, Hessenberg reduction,
/// Francis double-shift QR). Throws NoConvergence after 100 n^2 iterations.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// max Re(lambda) over the spectrum of `a`.
double real_spectral_abscissa(const Matrix& a);

/// Solves A X = B by LU with partial pivoting. Throws SingularOperator.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Solves F X + X G = W through the Kronecker-vectorized system
/// (I_k (x) F + G^T (x) I_n) vec(X) = vec(W). Throws SingularOperator when F
/// and -G share an eigenvalue (numerically).
Matrix solve_sylvester(const Matrix& f, const Matrix& g, const Matrix& w);

/// Symmetric PSD square root. Eigenvalues in [-1e-10 lambda_max, 0) are
/// clamped to zero; anything more negative throws NotPSD.
Matrix psd_sqrt(const Matrix& m);

inline constexpr double kDefaultRankTolerance = 1e-10;

/// Moore-Penrose pseudoinverse from the eigendecomposition of the smaller
/// Gram matrix. Gram eigenvalues below rel_tol * (largest Gram eigenvalue)
/// are treated as zero.
Matrix pseudo_inverse(const Matrix& a, double rel_tol = kDefaultRankTolerance);

/// Orthonormal basis (columns) of ker(A), same rank rule as pseudo_inverse.
Matrix null_space(const Matrix& a, double rel_tol = kDefaultRankTolerance);

struct ConstrainedLstsqResult {
  Vector solution;
  double objective = 0.0;      // ||obj_map x - obj_rhs||_2
  double eq_residual = 0.0;    // ||eq_map x - eq_rhs||_2
  double kkt_residual = 0.0;   // ||Z^T obj_map^T (obj_map x - obj_rhs)||_2
  Matrix null_basis;           // Z
};

/// min ||obj_map x - obj_rhs|| subject to eq_map x = eq_rhs (null-space method).
/// Among minimizers the minimum-norm one is returned. An eq_map with zero rows
/// means "unconstrained". Throws InconsistentConstraints when the equality
/// system has no solution (residual > 1e-8 ||eq_rhs||).
ConstrainedLstsqResult constrained_lstsq(const Matrix& obj_map, std::span<const double> obj_rhs,
                                         const Matrix& eq_map, std::span<const double> eq_rhs,
                                         double rel_tol = kDefaultRankTolerance);

}  // namespace gaas::numerics
