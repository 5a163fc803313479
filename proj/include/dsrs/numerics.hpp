#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsrs/matrix.hpp"

namespace dsrs {

/// Eigen-decomposition of a real symmetric matrix. Eigenvalues are sorted
/// descending; column i of `eigenvectors` pairs with `eigenvalues[i]`. Each
/// eigenvector is normalized so that its entry of largest magnitude is
/// positive.
struct SymmetricEigen {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

double mean(std::span<const double> x);

/// Sample standard deviation (n - 1 divisor). Requires n >= 2.
double sample_sd(std::span<const double> x);

/// Solve A x = b for symmetric positive definite A via Cholesky
/// factorization. Throws CollinearityError naming the first column whose
/// pivot falls below 1e-12 times the largest diagonal entry.
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

/// Diagonal of A^-1 for symmetric positive definite A.
std::vector<double> spd_inverse_diagonal(const Matrix& a);

/// Least-squares solution of design * x ~= y via Householder QR, together
/// with the diagonal of (design^T design)^-1 needed for coefficient
/// standard errors. Throws CollinearityError on rank deficiency, naming the
/// first dependent design column.
struct LeastSquares {
    std::vector<double> coefficients;
    std::vector<double> inverse_gram_diagonal;
};
LeastSquares solve_least_squares(const Matrix& design, std::span<const double> y);

/// Pearson correlation coefficient, clamped to [-1, 1]. Requires n >= 2 and
/// nonzero variance in both arguments (ConstantColumnError otherwise).
double pearson(std::span<const double> x1, std::span<const double> x2);

/// Center to mean zero and scale to unit sample standard deviation.
std::vector<double> standardize(std::span<const double> x);

/// Correlation matrix of the columns of X: symmetric with unit diagonal.
/// A constant column raises ConstantColumnError naming the column index.
Matrix correlation_matrix(const Matrix& x);

/// Cyclic Jacobi rotations; converges when the off-diagonal norm drops
/// below 1e-12 relative to the matrix norm, with a 100-sweep cap. Input
/// must be symmetric within 1e-10 per entry.
SymmetricEigen eigen_symmetric(const Matrix& a);

/// Regularized incomplete beta function I_x(a, b), evaluated by continued
/// fractions (modified Lentz) with the symmetry switch at
/// x > (a + 1) / (a + b + 2).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of the t distribution: 2 * (1 - CDF(|t|, df)).
double t_pvalue_two_sided(double t, int df);

/// Upper-tail probability of the F(df1, df2) distribution.
double f_pvalue(double f, int df1, int df2);

}  // namespace dsrs
