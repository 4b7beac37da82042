#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "smperf/constellation.hpp"
#include "smperf/error.hpp"
#include "smperf/numerics.hpp"
#include "smperf/random.hpp"

namespace smperf {

/// One SM transmission: antenna u carries symbol X_v, all other antennas are silent.
struct SmFrame {
    std::size_t antenna = 0;
    std::size_t symbol = 0;
    BitVector bits;

    static SmFrame from_bits(BitVector bits, const SmDimensions& dims)
    {
        const auto as = split_bits(bits, dims);
        return {as.antenna, as.symbol, std::move(bits)};
    }

    static SmFrame from_indices(std::size_t antenna, std::size_t symbol, const SmDimensions& dims)
    {
        return {antenna, symbol, merge_bits({antenna, symbol}, dims)};
    }
};

namespace detail {

inline void check_transmit_inputs(std::size_t antenna, std::size_t symbol, const ComplexMatrix& h,
                                  const Constellation& c, double rho)
{
    if (!(rho > 0.0))
        throw Error(ErrorCode::parameter, "SNR must be positive");
    if (antenna >= static_cast<std::size_t>(h.cols()) || symbol >= c.size())
        throw Error(ErrorCode::range, "frame indices outside channel/constellation");
}

} // namespace detail

/// y = sqrt(rho)·h_u·X_v + noise, written into `y` (resized if needed).
inline void received_signal_into(std::size_t antenna, std::size_t symbol, const ComplexMatrix& h,
                                 const Constellation& c, double rho, const ComplexVector& noise,
                                 ComplexVector& y)
{
    if (noise.size() != h.rows())
        throw Error(ErrorCode::dimension, "noise length differs from receive antenna count");
    y.noalias() = (std::sqrt(rho) * c.symbols[symbol]) * h.col(static_cast<Eigen::Index>(antenna));
    y += noise;
}

inline ComplexVector received_signal(const SmFrame& frame, const ComplexMatrix& h,
                                     const Constellation& c, double rho, const ComplexVector& noise)
{
    detail::check_transmit_inputs(frame.antenna, frame.symbol, h, c, rho);
    ComplexVector y(h.rows());
    received_signal_into(frame.antenna, frame.symbol, h, c, rho, noise, y);
    return y;
}

inline ComplexVector transmit(const SmFrame& frame, const ComplexMatrix& h, const Constellation& c,
                              double rho, RandomStream& rng)
{
    detail::check_transmit_inputs(frame.antenna, frame.symbol, h, c, rho);
    ComplexNormal normal;
    ComplexVector noise(h.rows());
    for (Eigen::Index i = 0; i < noise.size(); ++i)
        noise(i) = normal(rng);
    ComplexVector y(h.rows());
    received_signal_into(frame.antenna, frame.symbol, h, c, rho, noise, y);
    return y;
}

/// Exhaustive ML detection over all N_t·M hypotheses with the metric
///   D(u, v) = sqrt(rho)·||h_u X_v||² - 2·Re{y^H h_u X_v},
/// evaluated per antenna as sqrt(rho)·||h_u||²·|X_v|² - 2·Re{(y^H h_u)·X_v}.
/// Ties go to the lowest antenna, then the lowest symbol.
inline AntennaSymbol ml_detect(const ComplexVector& y, const ComplexMatrix& h,
                               const Constellation& c, double rho)
{
    if (!(rho > 0.0))
        throw Error(ErrorCode::parameter, "SNR must be positive");
    if (y.size() != h.rows())
        throw Error(ErrorCode::dimension, "received vector length differs from channel rows");
    const double root_rho = std::sqrt(rho);
    AntennaSymbol best{};
    double best_metric = std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < h.cols(); ++u) {
        const double energy = root_rho * h.col(u).squaredNorm();
        const Complex correlation = y.dot(h.col(u));
        for (std::size_t v = 0; v < c.size(); ++v) {
            const Complex& x = c.symbols[v];
            const double metric = energy * std::norm(x) - 2.0 * (correlation * x).real();
            if (metric < best_metric) {
                best_metric = metric;
                best = {static_cast<std::size_t>(u), v};
            }
        }
    }
    return best;
}

} // namespace smperf
