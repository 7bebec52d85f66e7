#ifndef WAVEDET_LINALG_HPP
#define WAVEDET_LINALG_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wavedet {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Dense square complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), a_(n * n) {}

    std::size_t dim() const { return n_; }
    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::span<const cplx> data() const { return a_; }
    std::span<cplx> data() { return a_; }

    static CMatrix identity(std::size_t n);

    CMatrix& operator+=(const CMatrix& other);

    /// Largest elementwise |A - A^H| deviation.
    double hermitian_defect() const;

    double trace_real() const;

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

/// Spec alias: covariance matrices are Hermitian PSD CMatrix values built
/// by the construction routines in signal.hpp.
using CovarianceMatrix = CMatrix;

cvec matvec(const CMatrix& a, const cvec& x);

cplx dot_conj(const cvec& a, const cvec& b); // a^H b
double norm2(const cvec& a);                 // sqrt(a^H a)

/**
 * @brief Cholesky factorization A = L L^H for Hermitian positive definite A.
 *
 * Fails (returns false) when any pivot drops to pivot_floor or below; L is
 * then unspecified.
 */
bool cholesky(const CMatrix& a, CMatrix& lower, double pivot_floor = 0.0);

/**
 * @brief Cholesky with the documented PSD regularization.
 *
 * Uses pivot floor delta = 1e-12 * trace/n as the smallest acceptable scale;
 * if the plain factorization dips below it, retries once on A + delta*I.
 * Throws ConditioningError when the matrix is singular beyond that.
 */
CMatrix chol_psd(const CMatrix& omega);

/// Solve L L^H x = b given the lower Cholesky factor.
cvec solve_chol(const CMatrix& lower, const cvec& b);

/// Solve A x = b for Hermitian PD A (factorize + solve, with regularization).
cvec solve_hermitian(const CMatrix& a, const cvec& b);

struct MinEigResult {
    cvec vector;       // unit-norm eigenvector for the smallest eigenvalue
    double lambda_min; // smallest eigenvalue of omega
    int iterations;
    bool converged;
};

/**
 * @brief Eigenpair for the smallest eigenvalue of a Hermitian PD matrix.
 *
 * Inverse power iteration with Cholesky solves; equivalently the dominant
 * eigenvector of omega^{-1}. Stops when the omega^{-1} eigen-residual falls
 * below tol relative to the Rayleigh quotient.
 */
MinEigResult min_eigpair(const CMatrix& omega, const cvec& start,
                         double tol = 1e-12, int max_iters = 50000);

/// Complex -> interleaved real: [Re x1, Im x1, Re x2, Im x2, ...].
std::vector<double> c2r(const cvec& x);
std::vector<double> c2r(std::span<const cplx> x);

/// Inverse of c2r; length must be even.
cvec r2c(std::span<const double> x);

} // namespace wavedet

#endif // WAVEDET_LINALG_HPP
