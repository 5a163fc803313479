#include "dsrs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dsrs/errors.hpp"

namespace dsrs {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw ContractViolationError(std::string(who) + ": matrix must be square and non-empty");
}

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// A pivot at or below 1e-12 * max diagonal marks column j as linearly
// dependent on the preceding ones.
Matrix cholesky_factor(const Matrix& a) {
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double tol = 1e-12 * max_diag;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > tol))
            throw CollinearityError(
                "collinear predictors: column " + std::to_string(j) +
                    " is numerically dependent on preceding columns",
                j);
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) throw ContractViolationError("mean: empty input");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw ContractViolationError("sample_sd: need at least 2 values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b) {
    require_square(a, "solve_spd");
    if (b.size() != a.rows())
        throw ContractViolationError("solve_spd: dimension mismatch");
    return cholesky_solve(cholesky_factor(a), b);
}

std::vector<double> spd_inverse_diagonal(const Matrix& a) {
    require_square(a, "spd_inverse_diagonal");
    const std::size_t n = a.rows();
    const Matrix l = cholesky_factor(a);
    std::vector<double> diag(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        diag[j] = cholesky_solve(l, e)[j];
        e[j] = 0.0;
    }
    return diag;
}

LeastSquares solve_least_squares(const Matrix& design, std::span<const double> y) {
    const std::size_t n = design.rows();
    const std::size_t m = design.cols();
    if (y.size() != n) throw ContractViolationError("solve_least_squares: dimension mismatch");
    if (n < m) throw InsufficientDataError("solve_least_squares: fewer rows than columns");

    // Householder QR, factoring in place; rhs transformed alongside.
    Matrix r = design;
    std::vector<double> rhs(y.begin(), y.end());
    double max_norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double cn = 0.0;
        for (std::size_t i = 0; i < n; ++i) cn += r(i, j) * r(i, j);
        max_norm = std::max(max_norm, std::sqrt(cn));
    }
    const double tol = 1e-12 * max_norm;

    std::vector<double> v(n);
    for (std::size_t j = 0; j < m; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += r(i, j) * r(i, j);
        norm = std::sqrt(norm);
        if (!(norm > tol))
            throw CollinearityError(
                "collinear predictors: column " + std::to_string(j) +
                    " is numerically dependent on preceding columns",
                j);
        const double alpha = (r(j, j) >= 0.0) ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            v[i] = r(i, j);
            if (i == j) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 > 0.0) {
            for (std::size_t c = j; c < m; ++c) {
                double dot = 0.0;
                for (std::size_t i = j; i < n; ++i) dot += v[i] * r(i, c);
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = j; i < n; ++i) r(i, c) -= f * v[i];
            }
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i] * rhs[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) rhs[i] -= f * v[i];
        }
        r(j, j) = alpha;
        if (!(std::abs(r(j, j)) > tol))
            throw CollinearityError(
                "collinear predictors: column " + std::to_string(j) +
                    " is numerically dependent on preceding columns",
                j);
    }

    LeastSquares out;
    out.coefficients.assign(m, 0.0);
    for (std::size_t jj = m; jj-- > 0;) {
        double s = rhs[jj];
        for (std::size_t k = jj + 1; k < m; ++k) s -= r(jj, k) * out.coefficients[k];
        out.coefficients[jj] = s / r(jj, jj);
    }

    // (D^T D)^-1 = R^-1 R^-T; its diagonal is the squared row norm of R^-1.
    Matrix rinv(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> col(m, 0.0);
        col[j] = 1.0;
        for (std::size_t ii = j + 1; ii-- > 0;) {
            double s = col[ii];
            for (std::size_t k = ii + 1; k <= j; ++k) s -= r(ii, k) * rinv(k, j);
            rinv(ii, j) = s / r(ii, ii);
        }
    }
    out.inverse_gram_diagonal.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t k = i; k < m; ++k) s += rinv(i, k) * rinv(i, k);
        out.inverse_gram_diagonal[i] = s;
    }
    return out;
}

double pearson(std::span<const double> x1, std::span<const double> x2) {
    if (x1.size() != x2.size()) throw ContractViolationError("pearson: length mismatch");
    const std::size_t n = x1.size();
    if (n < 2) throw ContractViolationError("pearson: need at least 2 observations");
    const double m1 = mean(x1);
    const double m2 = mean(x2);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = x1[i] - m1;
        const double d2 = x2[i] - m2;
        sxy += d1 * d2;
        sxx += d1 * d1;
        syy += d2 * d2;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ConstantColumnError("constant column: correlation undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> standardize(std::span<const double> x) {
    if (x.size() < 2) throw ContractViolationError("standardize: need at least 2 values");
    const double m = mean(x);
    const double sd = sample_sd(x);
    if (sd == 0.0) throw ConstantColumnError("constant column: cannot standardize");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / sd;
    return out;
}

Matrix correlation_matrix(const Matrix& x) {
    const std::size_t p = x.cols();
    if (p == 0 || x.rows() < 2)
        throw ContractViolationError("correlation_matrix: need at least 2 rows and 1 column");
    std::vector<std::vector<double>> cols(p);
    for (std::size_t j = 0; j < p; ++j) {
        cols[j] = x.column(j);
        const double m = mean(cols[j]);
        double ss = 0.0;
        for (double v : cols[j]) ss += (v - m) * (v - m);
        if (ss == 0.0)
            throw ConstantColumnError("constant column: column " + std::to_string(j) +
                                      " has zero variance");
    }
    Matrix r(p, p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        r(i, i) = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = pearson(cols[i], cols[j]);
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

SymmetricEigen eigen_symmetric(const Matrix& a) {
    require_square(a, "eigen_symmetric");
    const std::size_t p = a.rows();
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
                throw ContractViolationError("eigen_symmetric: input is not symmetric");
        }

    Matrix m = a;
    Matrix v = Matrix::identity(p);

    double norm = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) norm += m(i, j) * m(i, j);
    norm = std::sqrt(norm);
    const double target = 1e-12 * std::max(1.0, norm);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += 2.0 * m(i, j) * m(i, j);
        if (std::sqrt(off) < target) break;

        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i + 1; j < p; ++j) {
                const double apq = m(i, j);
                if (apq == 0.0) continue;
                const double theta = (m(j, j) - m(i, i)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double aii = m(i, i), ajj = m(j, j);
                m(i, i) = aii - t * apq;
                m(j, j) = ajj + t * apq;
                m(i, j) = 0.0;
                m(j, i) = 0.0;
                for (std::size_t k = 0; k < p; ++k) {
                    if (k == i || k == j) continue;
                    const double aik = m(i, k), ajk = m(j, k);
                    m(i, k) = c * aik - s * ajk;
                    m(k, i) = m(i, k);
                    m(j, k) = s * aik + c * ajk;
                    m(k, j) = m(j, k);
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double vki = v(k, i), vkj = v(k, j);
                    v(k, i) = c * vki - s * vkj;
                    v(k, j) = s * vki + c * vkj;
                }
            }
        }
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return m(l, l) > m(r, r); });

    SymmetricEigen out;
    out.eigenvalues.resize(p);
    out.eigenvectors = Matrix(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        const std::size_t src = order[c];
        out.eigenvalues[c] = m(src, src);
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            if (std::abs(v(k, src)) > vmax) {
                vmax = std::abs(v(k, src));
                imax = k;
            }
        }
        const double sign = (v(imax, src) < 0.0) ? -1.0 : 1.0;
        for (std::size_t k = 0; k < p; ++k) out.eigenvectors(k, c) = sign * v(k, src);
    }
    return out;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr double fpmin = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int mi = 1; mi <= 500; ++mi) {
        const double m = static_cast<double>(mi);
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double clamp_probability(double p) {
    if (p < std::numeric_limits<double>::min()) return std::numeric_limits<double>::min();
    return std::min(p, 1.0);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ContractViolationError("regularized_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                            (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_pvalue_two_sided(double t, int df) {
    if (df < 1) throw ContractViolationError("t_pvalue_two_sided: df must be >= 1");
    if (std::isnan(t)) throw ContractViolationError("t_pvalue_two_sided: t is NaN");
    const double v = static_cast<double>(df);
    if (std::isinf(t)) return std::numeric_limits<double>::min();
    const double x = v / (v + t * t);
    return clamp_probability(regularized_incomplete_beta(v / 2.0, 0.5, x));
}

double f_pvalue(double f, int df1, int df2) {
    if (df1 < 1 || df2 < 1) throw ContractViolationError("f_pvalue: df must be >= 1");
    if (std::isnan(f) || f < 0.0)
        throw ContractViolationError("f_pvalue: statistic must be >= 0");
    const double d1 = static_cast<double>(df1);
    const double d2 = static_cast<double>(df2);
    if (std::isinf(f)) return std::numeric_limits<double>::min();
    const double x = d2 / (d2 + d1 * f);
    return clamp_probability(regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x));
}

}  // namespace dsrs
