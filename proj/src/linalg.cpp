#include "wavedet/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "wavedet/errors.hpp"

namespace wavedet {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
    if (other.dim() != n_) throw DimensionError("CMatrix::operator+=: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

double CMatrix::hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

double CMatrix::trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i).real();
    return t;
}

cvec matvec(const CMatrix& a, const cvec& x) {
    if (a.dim() != x.size()) throw DimensionError("matvec: dimension mismatch");
    cvec y(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

cplx dot_conj(const cvec& a, const cvec& b) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm2(const cvec& a) {
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return std::sqrt(acc);
}

bool cholesky(const CMatrix& a, CMatrix& lower, double pivot_floor) {
    const std::size_t n = a.dim();
    lower = CMatrix(n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) diag -= std::norm(lower(j, k));
        if (!(diag > pivot_floor)) return false;
        const double ljj = std::sqrt(diag);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= lower(i, k) * std::conj(lower(j, k));
            lower(i, j) = acc / ljj;
        }
    }
    return true;
}

CMatrix chol_psd(const CMatrix& omega) {
    const std::size_t n = omega.dim();
    const double delta = 1e-12 * omega.trace_real() / static_cast<double>(n);
    CMatrix lower;
    if (cholesky(omega, lower, delta)) return lower;
    CMatrix shifted = omega;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += delta;
    if (cholesky(shifted, lower, 0.0)) return lower;
    throw ConditioningError("chol_psd: matrix singular beyond 1e-12*trace/n regularization");
}

cvec solve_chol(const CMatrix& lower, const cvec& b) {
    const std::size_t n = lower.dim();
    if (b.size() != n) throw DimensionError("solve_chol: dimension mismatch");
    cvec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = b[i];
        for (std::size_t k = 0; k < i; ++k) acc -= lower(i, k) * y[k];
        y[i] = acc / lower(i, i);
    }
    cvec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cplx acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= std::conj(lower(k, ii)) * x[k];
        x[ii] = acc / lower(ii, ii);
    }
    return x;
}

cvec solve_hermitian(const CMatrix& a, const cvec& b) {
    return solve_chol(chol_psd(a), b);
}

MinEigResult min_eigpair(const CMatrix& omega, const cvec& start, double tol, int max_iters) {
    if (omega.dim() != start.size()) throw DimensionError("min_eigpair: dimension mismatch");
    const CMatrix lower = chol_psd(omega);

    cvec v = start;
    const double n0 = norm2(v);
    if (n0 == 0.0) throw ConditioningError("min_eigpair: zero start vector");
    for (auto& c : v) c /= n0;

    MinEigResult result;
    result.converged = false;
    result.iterations = 0;
    double mu = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        cvec w = solve_chol(lower, v); // omega^{-1} v
        mu = dot_conj(v, w).real();    // Rayleigh quotient of omega^{-1}
        double resid = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) resid += std::norm(w[i] - mu * v[i]);
        resid = std::sqrt(resid);
        const double wn = norm2(w);
        for (auto& c : w) c /= wn;
        v = std::move(w);
        result.iterations = it + 1;
        if (resid <= tol * mu) {
            result.converged = true;
            break;
        }
    }
    result.vector = std::move(v);
    result.lambda_min = 1.0 / mu;
    return result;
}

std::vector<double> c2r(std::span<const cplx> x) {
    std::vector<double> out(2 * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[2 * i] = x[i].real();
        out[2 * i + 1] = x[i].imag();
    }
    return out;
}

std::vector<double> c2r(const cvec& x) {
    return c2r(std::span<const cplx>(x));
}

cvec r2c(std::span<const double> x) {
    if (x.size() % 2 != 0) throw DimensionError("r2c: length must be even");
    cvec out(x.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {x[2 * i], x[2 * i + 1]};
    return out;
}

} // namespace wavedet
