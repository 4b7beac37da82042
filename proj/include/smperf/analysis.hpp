#pragma once

// Union bound on the bit error probability of spatial modulation.
//
// For a competing pair (u, v) -> (û, v̂) the scaled error vector
// z̃ = sqrt(rho/4)·(h_u X_v - h_û X_v̂) is proper complex Gaussian with
//
//   mean       m = sqrt(rho K / (4(K+1))) · (X_v - X_v̂) · 1
//   covariance S = rho / (4(K+1)) · b · Sr,
//   b = |X_v|² + |X_v̂|² - 2 Re{st(u,û) X_v conj(X_v̂)},
//
// and the pairwise error probability E[Q(||z||)] is the finite integral
//
//   (1/pi) ∫_0^{pi/2} exp(-m^H [S + sin²θ I]^{-1} m) / det(S / sin²θ + I) dθ.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>

#include "smperf/channel.hpp"
#include "smperf/constellation.hpp"
#include "smperf/error.hpp"
#include "smperf/numerics.hpp"

namespace smperf {

enum class PrefactorMode {
    paper,        // 1 / (N_t M - 1)
    conventional, // 1 / (N_t M), uniform prior over transmitted pairs
};

inline const char* to_string(PrefactorMode mode) noexcept
{
    return mode == PrefactorMode::paper ? "paper" : "conventional";
}

struct BoundConfig {
    std::size_t quad_nodes = 64;
    PrefactorMode prefactor = PrefactorMode::paper;

    void validate() const
    {
        if (quad_nodes < 8)
            throw Error(ErrorCode::parameter,
                        "quad_nodes must be >= 8, got " + std::to_string(quad_nodes));
    }
};

struct PepStatistics {
    ComplexVector mean;           // m̃_Z
    HermitianPsdMatrix covariance; // Σ̃_Z
    double bracket = 0.0;          // b, so Σ̃_Z = rho/(4(K+1))·b·Sr
    bool clamped = false;          // b was a tiny negative rounding residue set to 0
    bool degenerate = false;       // m̃_Z = 0 and Σ̃_Z = 0
};

namespace detail {

inline void check_rho(double rho)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw Error(ErrorCode::parameter, "SNR must be finite and positive");
}

inline double checked_bracket(double b, double energy_scale, bool& clamped)
{
    // Cancellation residue at the level of a few ulps is treated as exact zero.
    const double snap = 1e-15 * energy_scale;
    if (b < -1e-12) {
        std::ostringstream os;
        os << "covariance bracket " << b << " is negative; transmit correlation is not valid";
        throw Error(ErrorCode::internal_consistency, os.str());
    }
    if (b < 0.0)
        clamped = true;
    return b <= snap ? 0.0 : b;
}

inline PepStatistics make_statistics(ComplexVector mean, const ChannelSpec& spec, double scale,
                                     double bracket, bool clamped)
{
    PepStatistics s{std::move(mean), spec.sigma_r().scaled(scale * bracket), bracket, clamped,
                    false};
    s.degenerate = bracket == 0.0 && s.mean.cwiseAbs().maxCoeff() == 0.0;
    return s;
}

} // namespace detail

inline PepStatistics pep_statistics(std::size_t u, std::size_t u_hat, std::size_t v,
                                    std::size_t v_hat, const ChannelSpec& spec,
                                    const Constellation& c, double rho)
{
    detail::check_rho(rho);
    if (u >= spec.n_t() || u_hat >= spec.n_t() || v >= c.size() || v_hat >= c.size())
        throw Error(ErrorCode::range, "pair indices outside antennas/constellation");
    const double k = spec.k_factor();
    const Complex& x = c.symbols[v];
    const Complex& x_hat = c.symbols[v_hat];
    const Complex st = spec.sigma_t().matrix()(static_cast<Eigen::Index>(u),
                                               static_cast<Eigen::Index>(u_hat));

    const double energy = std::norm(x) + std::norm(x_hat);
    bool clamped = false;
    const double bracket =
        detail::checked_bracket(energy - 2.0 * (st * x * std::conj(x_hat)).real(), energy, clamped);

    const Complex mean_entry = std::sqrt(rho * k / (4.0 * (k + 1.0))) * (x - x_hat);
    ComplexVector mean = ComplexVector::Constant(static_cast<Eigen::Index>(spec.n_r()), mean_entry);
    return detail::make_statistics(std::move(mean), spec, rho / (4.0 * (k + 1.0)), bracket, clamped);
}

/// Space-shift keying pair statistics: zero mean, Σ̃ = rho/(2(K+1))·(1 - Re st(u,û))·Sr.
inline PepStatistics ssk_pep_statistics(std::size_t u, std::size_t u_hat, const ChannelSpec& spec,
                                        double rho)
{
    detail::check_rho(rho);
    if (u >= spec.n_t() || u_hat >= spec.n_t())
        throw Error(ErrorCode::range, "antenna indices outside transmit array");
    const double k = spec.k_factor();
    const double st = spec.sigma_t().matrix()(static_cast<Eigen::Index>(u),
                                              static_cast<Eigen::Index>(u_hat)).real();
    bool clamped = false;
    // b = 2 - 2 Re st, written as 2(1 - Re st) with the factor 2 moved into the scale.
    const double half_bracket = detail::checked_bracket(1.0 - st, 1.0, clamped);
    ComplexVector mean = ComplexVector::Zero(static_cast<Eigen::Index>(spec.n_r()));
    auto s = detail::make_statistics(std::move(mean), spec, rho / (2.0 * (k + 1.0)), half_bracket,
                                     clamped);
    s.bracket = 2.0 * half_bracket;
    return s;
}

/// Pairwise error probability by Gauss–Legendre quadrature of the Craig-form
/// integral. The integrand is evaluated on the eigenbasis of Σ̃:
///   quadratic form = Σ_i |V^H m|_i² / (λ_i + sin²θ),  det = Π_i (1 + λ_i / sin²θ).
inline double apep(const PepStatistics& stats, const GaussLegendreRule& rule)
{
    if (stats.degenerate)
        return 0.5;
    const auto& lambda = stats.covariance.eigenvalues();
    const RealVector weight = (stats.covariance.eigenvectors().adjoint() * stats.mean).cwiseAbs2();
    const auto n = lambda.size();
    const double integral = rule.integrate([&](double theta) {
        const double s = std::sin(theta) * std::sin(theta);
        double exponent = 0.0;
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            exponent += weight(i) / (lambda(i) + s);
            log_det += std::log1p(lambda(i) / s);
        }
        return std::exp(-exponent - log_det);
    });
    const double p = integral / std::numbers::pi;
    return std::min(0.5, std::max(0.0, p));
}

inline double apep(const PepStatistics& stats, const BoundConfig& cfg = {})
{
    cfg.validate();
    return apep(stats, GaussLegendreRule(cfg.quad_nodes));
}

struct AbepBound {
    double raw = 0.0;
    double clipped = 0.0; // min(raw, 0.5)
};

namespace detail {

inline double prefactor(PrefactorMode mode, std::size_t hypotheses)
{
    if (hypotheses < 2)
        throw Error(ErrorCode::parameter, "need at least two (antenna, symbol) hypotheses");
    const double count = static_cast<double>(hypotheses);
    return mode == PrefactorMode::paper ? 1.0 / (count - 1.0) : 1.0 / count;
}

inline AbepBound finish(double sum, double prefactor, unsigned rate)
{
    const double raw = prefactor * sum / static_cast<double>(rate);
    return {raw, std::min(raw, 0.5)};
}

} // namespace detail

/// Union bound over every ordered pair of (antenna, symbol) hypotheses,
/// weighted by the label Hamming distance. Summation order is fixed.
inline AbepBound abep_bound(const ChannelSpec& spec, const Constellation& c, double rho,
                            const BoundConfig& cfg = {})
{
    cfg.validate();
    const auto dims = make_dimensions(static_cast<unsigned>(spec.n_t()), c);
    const double pre = detail::prefactor(cfg.prefactor, spec.n_t() * c.size());
    const GaussLegendreRule rule(cfg.quad_nodes);
    double sum = 0.0;
    for (std::size_t u = 0; u < spec.n_t(); ++u)
        for (std::size_t u_hat = 0; u_hat < spec.n_t(); ++u_hat)
            for (std::size_t v = 0; v < c.size(); ++v)
                for (std::size_t v_hat = 0; v_hat < c.size(); ++v_hat) {
                    const unsigned bits = hamming_label_distance(u, v, u_hat, v_hat, dims);
                    if (bits == 0)
                        continue;
                    sum += bits * apep(pep_statistics(u, u_hat, v, v_hat, spec, c, rho), rule);
                }
    return detail::finish(sum, pre, dims.rate());
}

inline AbepBound ssk_abep_bound(const ChannelSpec& spec, double rho, const BoundConfig& cfg = {})
{
    cfg.validate();
    if (spec.n_t() < 2)
        throw Error(ErrorCode::parameter, "SSK needs at least two transmit antennas");
    const auto dims = make_dimensions(static_cast<unsigned>(spec.n_t()), 1);
    const double pre = detail::prefactor(cfg.prefactor, spec.n_t());
    const GaussLegendreRule rule(cfg.quad_nodes);
    double sum = 0.0;
    for (std::size_t u = 0; u < spec.n_t(); ++u)
        for (std::size_t u_hat = 0; u_hat < spec.n_t(); ++u_hat) {
            const unsigned bits = hamming_label_distance(u, 0, u_hat, 0, dims);
            if (bits == 0)
                continue;
            sum += bits * apep(ssk_pep_statistics(u, u_hat, spec, rho), rule);
        }
    return detail::finish(sum, pre, dims.rate());
}

/// Dispatches to the SSK form for the single-point alphabet.
inline AbepBound bound_for(const ChannelSpec& spec, const Constellation& c, double rho,
                           const BoundConfig& cfg = {})
{
    return c.size() == 1 ? ssk_abep_bound(spec, rho, cfg) : abep_bound(spec, c, rho, cfg);
}

} // namespace smperf
