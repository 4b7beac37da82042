#pragma once

// Complex linear algebra and quadrature primitives shared by the channel,
// analysis and simulation code. Dense matrices are Eigen types; every matrix
// here is small (at most a few tens of rows).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smperf/error.hpp"

namespace smperf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kSingularTolerance = 1e-14;

inline bool all_finite(const ComplexMatrix& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

inline double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::dimension, "cannot compare matrices of different shape");
    if (a.size() == 0)
        return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

/// Hermitian positive semidefinite matrix. Construction checks both
/// properties; the eigenvalue spectrum is computed once and kept, since
/// every consumer (square root, solve, quadrature) needs it.
class HermitianPsdMatrix {
public:
    explicit HermitianPsdMatrix(ComplexMatrix m) : m_(std::move(m))
    {
        if (m_.rows() != m_.cols())
            throw Error(ErrorCode::dimension, "Hermitian matrix must be square, got " +
                                                  std::to_string(m_.rows()) + "x" +
                                                  std::to_string(m_.cols()));
        if (!all_finite(m_))
            throw Error(ErrorCode::contract_violation, "matrix has non-finite entries");
        const double asym = m_.size() == 0 ? 0.0 : (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kHermitianTolerance) {
            std::ostringstream os;
            os << "matrix is not Hermitian (max |M - M^H| = " << asym << ")";
            throw Error(ErrorCode::contract_violation, os.str());
        }
        // Symmetrize so the eigensolver sees an exactly Hermitian input.
        m_ = (0.5 * (m_ + m_.adjoint())).eval();
        decompose();
        if (size() > 0 && eigenvalues_.minCoeff() < -kPsdTolerance) {
            std::ostringstream os;
            os << "eigenvalue " << eigenvalues_.minCoeff() << " below " << -kPsdTolerance;
            throw Error(ErrorCode::not_psd, os.str());
        }
        eigenvalues_ = eigenvalues_.cwiseMax(0.0);
    }

    static HermitianPsdMatrix identity(Eigen::Index n)
    {
        return HermitianPsdMatrix(ComplexMatrix::Identity(n, n));
    }

    static HermitianPsdMatrix zero(Eigen::Index n)
    {
        return HermitianPsdMatrix(ComplexMatrix::Zero(n, n));
    }

    /// s·M for s ≥ 0; reuses the eigenvectors instead of re-validating.
    HermitianPsdMatrix scaled(double s) const
    {
        if (!(s >= 0.0) || !std::isfinite(s))
            throw Error(ErrorCode::contract_violation, "PSD scale factor must be finite and >= 0");
        HermitianPsdMatrix out(*this, Unchecked{});
        out.m_ *= s;
        out.eigenvalues_ *= s;
        return out;
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Eigen::Index size() const noexcept { return m_.rows(); }

    /// Ascending eigenvalues, clamped at zero.
    const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
    /// Orthonormal eigenvectors as columns, matching eigenvalues().
    const ComplexMatrix& eigenvectors() const noexcept { return eigenvectors_; }

    bool is_zero() const noexcept { return size() == 0 || m_.cwiseAbs().maxCoeff() == 0.0; }

private:
    struct Unchecked {};
    HermitianPsdMatrix(const HermitianPsdMatrix& other, Unchecked)
        : m_(other.m_), eigenvalues_(other.eigenvalues_), eigenvectors_(other.eigenvectors_)
    {
    }

    void decompose()
    {
        if (size() == 0) {
            eigenvalues_.resize(0);
            eigenvectors_.resize(0, 0);
            return;
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorCode::contract_violation, "Hermitian eigendecomposition failed");
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    }

    ComplexMatrix m_;
    RealVector eigenvalues_;
    ComplexMatrix eigenvectors_;
};

/// Principal square root S = V·diag(√λ)·V^H, so S·S = M and S is Hermitian PSD.
inline ComplexMatrix hermitian_sqrt(const HermitianPsdMatrix& m)
{
    const auto& v = m.eigenvectors();
    if (m.size() == 0)
        return ComplexMatrix(0, 0);
    const RealVector root = m.eigenvalues().cwiseSqrt();
    ComplexMatrix s = v * root.cast<Complex>().asDiagonal() * v.adjoint();
    return (0.5 * (s + s.adjoint())).eval();
}

inline ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Determinant through LU with partial pivoting.
inline Complex det(const ComplexMatrix& m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorCode::dimension, "determinant of non-square " + std::to_string(m.rows()) +
                                              "x" + std::to_string(m.cols()) + " matrix");
    if (m.rows() == 0)
        return Complex(1.0, 0.0);
    return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

/// Solves M·x = v through the stored eigendecomposition of M.
inline ComplexVector solve_hermitian(const HermitianPsdMatrix& m, const ComplexVector& v)
{
    if (v.size() != m.size())
        throw Error(ErrorCode::dimension, "right-hand side has length " + std::to_string(v.size()) +
                                              ", matrix is " + std::to_string(m.size()) + "x" +
                                              std::to_string(m.size()));
    if (m.size() == 0)
        return ComplexVector(0);
    const double lambda_min = m.eigenvalues().minCoeff();
    if (lambda_min <= kSingularTolerance) {
        std::ostringstream os;
        os << "smallest eigenvalue " << lambda_min << " <= " << kSingularTolerance;
        throw Error(ErrorCode::singular, os.str());
    }
    const auto& vecs = m.eigenvectors();
    ComplexVector coeffs = vecs.adjoint() * v;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        coeffs(i) /= m.eigenvalues()(i);
    return vecs * coeffs;
}

/// Gaussian tail probability, Q(x) = ½·erfc(x/√2).
inline double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Gauss–Legendre rule for ∫₀^{π/2} f(θ) dθ. Nodes are interior points of
/// the interval, so integrands with removable endpoint behaviour never get
/// evaluated at θ = 0.
class GaussLegendreRule {
public:
    explicit GaussLegendreRule(std::size_t nodes) : nodes_(nodes), weights_(nodes)
    {
        if (nodes < 2)
            throw Error(ErrorCode::parameter, "Gauss-Legendre rule needs at least 2 nodes, got " +
                                                  std::to_string(nodes));
        const std::size_t n = nodes;
        const double half_length = std::numbers::pi / 4.0;
        const double midpoint = std::numbers::pi / 4.0;
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            // Newton iteration on P_n from the Tricomi initial guess.
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double derivative = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p1 = 1.0;
                double p2 = 0.0;
                for (std::size_t j = 1; j <= n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 -
                          (static_cast<double>(j) - 1.0) * p3) /
                         static_cast<double>(j);
                }
                derivative = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
                const double step = p1 / derivative;
                z -= step;
                if (std::abs(step) <= 1e-16)
                    break;
            }
            const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
            nodes_[i] = midpoint - half_length * z;
            nodes_[n - 1 - i] = midpoint + half_length * z;
            weights_[i] = half_length * w;
            weights_[n - 1 - i] = half_length * w;
        }
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    template <class F>
    double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double value = f(nodes_[i]);
            if (std::isnan(value)) {
                std::ostringstream os;
                os << "integrand returned NaN at theta = " << nodes_[i] << " (node " << i << ")";
                throw Error(ErrorCode::integration, os.str());
            }
            sum += weights_[i] * value;
        }
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

template <class F>
double gauss_legendre_integrate(F&& f, std::size_t nodes)
{
    return GaussLegendreRule(nodes).integrate(std::forward<F>(f));
}

} // namespace smperf
