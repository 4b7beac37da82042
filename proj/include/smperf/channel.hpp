#pragma once

// Correlated Rician MIMO channel under the Kronecker model:
//
//   H = sqrt(K/(K+1)) * Hbar + sqrt(1/(K+1)) * Sr^{1/2} * Hw * (St^{1/2})^T
//
// with Hbar the all-ones N_r x N_t matrix and Hw i.i.d. CN(0, 1).

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include "smperf/error.hpp"
#include "smperf/numerics.hpp"
#include "smperf/random.hpp"

namespace smperf {

/// Entry (u, v) = gamma^|u - v|. Only real |gamma| < 1 is supported.
inline HermitianPsdMatrix exponential_correlation(std::size_t size, double gamma)
{
    if (!std::isfinite(gamma) || std::abs(gamma) >= 1.0) {
        std::ostringstream os;
        os << "exponential correlation coefficient must satisfy |gamma| < 1, got " << gamma;
        throw Error(ErrorCode::parameter, os.str());
    }
    ComplexMatrix m(size, size);
    for (std::size_t u = 0; u < size; ++u)
        for (std::size_t v = 0; v < size; ++v) {
            const auto lag = static_cast<int>(u > v ? u - v : v - u);
            m(u, v) = lag == 0 ? 1.0 : std::pow(gamma, lag);
        }
    return HermitianPsdMatrix(std::move(m));
}

class ChannelSpec {
public:
    ChannelSpec(double k_factor, HermitianPsdMatrix sigma_t, HermitianPsdMatrix sigma_r)
        : k_factor_(k_factor), sigma_t_(std::move(sigma_t)), sigma_r_(std::move(sigma_r))
    {
        if (!(k_factor_ >= 0.0) || !std::isfinite(k_factor_))
            throw Error(ErrorCode::parameter, "Rician factor K must be finite and >= 0");
        if (sigma_t_.size() == 0 || sigma_r_.size() == 0)
            throw Error(ErrorCode::parameter, "antenna counts must be positive");
        check_unit_diagonal(sigma_t_, "transmit");
        check_unit_diagonal(sigma_r_, "receive");
        sqrt_sigma_r_ = hermitian_sqrt(sigma_r_);
        sqrt_sigma_t_transposed_ = hermitian_sqrt(sigma_t_).transpose();
    }

    static ChannelSpec uncorrelated(std::size_t n_t, std::size_t n_r, double k_factor)
    {
        return {k_factor, HermitianPsdMatrix::identity(static_cast<Eigen::Index>(n_t)),
                HermitianPsdMatrix::identity(static_cast<Eigen::Index>(n_r))};
    }

    static ChannelSpec exponential(std::size_t n_t, std::size_t n_r, double k_factor,
                                   double gamma_t, double gamma_r)
    {
        return {k_factor, exponential_correlation(n_t, gamma_t),
                exponential_correlation(n_r, gamma_r)};
    }

    std::size_t n_t() const noexcept { return static_cast<std::size_t>(sigma_t_.size()); }
    std::size_t n_r() const noexcept { return static_cast<std::size_t>(sigma_r_.size()); }
    double k_factor() const noexcept { return k_factor_; }
    const HermitianPsdMatrix& sigma_t() const noexcept { return sigma_t_; }
    const HermitianPsdMatrix& sigma_r() const noexcept { return sigma_r_; }
    const ComplexMatrix& sqrt_sigma_r() const noexcept { return sqrt_sigma_r_; }
    const ComplexMatrix& sqrt_sigma_t_transposed() const noexcept { return sqrt_sigma_t_transposed_; }

    double fixed_weight() const noexcept { return std::sqrt(k_factor_ / (k_factor_ + 1.0)); }
    double scatter_weight() const noexcept { return std::sqrt(1.0 / (k_factor_ + 1.0)); }

    /// E[vec(H)], column-major vec.
    ComplexVector mean_vec() const
    {
        return ComplexVector::Constant(static_cast<Eigen::Index>(n_t() * n_r()), fixed_weight());
    }

    /// E[(vec H - m)(vec H - m)^H] = (1/(K+1)) St ⊗ Sr.
    ComplexMatrix vec_covariance() const
    {
        return kronecker(sigma_t_.matrix(), sigma_r_.matrix()) / (k_factor_ + 1.0);
    }

private:
    static void check_unit_diagonal(const HermitianPsdMatrix& m, const char* side)
    {
        for (Eigen::Index i = 0; i < m.size(); ++i)
            if (std::abs(m.matrix()(i, i) - 1.0) > 1e-12) {
                std::ostringstream os;
                os << side << " correlation matrix diagonal entry " << i << " is "
                   << m.matrix()(i, i) << ", expected 1";
                throw Error(ErrorCode::parameter, os.str());
            }
    }

    double k_factor_;
    HermitianPsdMatrix sigma_t_;
    HermitianPsdMatrix sigma_r_;
    ComplexMatrix sqrt_sigma_r_;
    ComplexMatrix sqrt_sigma_t_transposed_;
};

/// Draws realizations of H into reusable storage. One sampler per worker.
class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelSpec& spec)
        : spec_(&spec),
          white_(spec.n_r(), spec.n_t()),
          left_(spec.n_r(), spec.n_t()),
          h_(spec.n_r(), spec.n_t())
    {
    }

    const ComplexMatrix& sample(RandomStream& rng)
    {
        for (Eigen::Index j = 0; j < white_.cols(); ++j)
            for (Eigen::Index i = 0; i < white_.rows(); ++i)
                white_(i, j) = normal_(rng);
        left_.noalias() = spec_->sqrt_sigma_r() * white_;
        h_.noalias() = left_ * spec_->sqrt_sigma_t_transposed();
        h_ *= spec_->scatter_weight();
        h_.array() += spec_->fixed_weight();
        return h_;
    }

private:
    const ChannelSpec* spec_;
    ComplexNormal normal_;
    ComplexMatrix white_;
    ComplexMatrix left_;
    ComplexMatrix h_;
};

inline ComplexMatrix sample_channel(const ChannelSpec& spec, RandomStream& rng)
{
    ChannelSampler sampler(spec);
    return sampler.sample(rng);
}

/// First and second moments of vec(H) estimated from draws.
struct VecMoments {
    std::size_t draws = 0;
    ComplexVector mean;
    ComplexMatrix covariance;
    ComplexMatrix pseudo_covariance;
};

template <class Draw>
VecMoments estimate_vec_moments(Draw&& draw, std::size_t draws)
{
    VecMoments out;
    out.draws = draws;
    ComplexMatrix first = draw();
    const Eigen::Index dim = first.size();
    ComplexVector sum = ComplexVector::Zero(dim);
    ComplexMatrix outer = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix pseudo = ComplexMatrix::Zero(dim, dim);
    ComplexVector x(dim);
    for (std::size_t n = 0; n < draws; ++n) {
        const ComplexMatrix h = n == 0 ? first : draw();
        x = Eigen::Map<const ComplexVector>(h.data(), dim);
        sum += x;
        outer.noalias() += x * x.adjoint();
        pseudo.noalias() += x * x.transpose();
    }
    const double count = static_cast<double>(draws);
    out.mean = sum / count;
    out.covariance = outer / count - out.mean * out.mean.adjoint();
    out.pseudo_covariance = pseudo / count - out.mean * out.mean.transpose();
    return out;
}

struct PropernessReport {
    std::size_t draws = 0;
    double max_pseudo_covariance = 0.0;
    double gate = 0.0;
    bool pass = false;
};

/// Properness gate on an arbitrary sampler: max |E[(h-m)(h-m)^T]| <= 5/sqrt(draws).
template <class Draw>
PropernessReport check_properness(Draw&& draw, std::size_t draws)
{
    if (draws < 10000)
        throw Error(ErrorCode::parameter, "properness check needs at least 10^4 draws");
    const auto moments = estimate_vec_moments(std::forward<Draw>(draw), draws);
    PropernessReport r;
    r.draws = draws;
    r.max_pseudo_covariance = moments.pseudo_covariance.cwiseAbs().maxCoeff();
    r.gate = 5.0 / std::sqrt(static_cast<double>(draws));
    r.pass = r.max_pseudo_covariance <= r.gate;
    return r;
}

inline PropernessReport validate_properness(const ChannelSpec& spec, std::size_t draws,
                                            RandomStream& rng)
{
    ChannelSampler sampler(spec);
    return check_properness([&] { return ComplexMatrix(sampler.sample(rng)); }, draws);
}

} // namespace smperf
