#pragma once

// Modulation alphabets and the bit bookkeeping of spatial modulation: the
// first n = log2(N_t) bits of a label pick the antenna, the remaining m bits
// pick the symbol, both in natural binary with the MSB first.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smperf/error.hpp"
#include "smperf/numerics.hpp"

namespace smperf {

struct Constellation {
    std::string name;
    std::vector<Complex> symbols;
    unsigned bits_per_symbol = 0;

    std::size_t size() const noexcept { return symbols.size(); }

    double average_energy() const
    {
        double e = 0.0;
        for (const auto& s : symbols)
            e += std::norm(s);
        return e / static_cast<double>(symbols.size());
    }
};

inline const std::vector<std::string>& constellation_names()
{
    static const std::vector<std::string> names{"bpsk", "qpsk", "qam8", "qam16", "qam32"};
    return names;
}

namespace detail {

// Rectangular grid with odd integer levels, indexed row-major over
// (real ascending, imaginary ascending) and scaled to unit average energy.
inline Constellation rectangular_qam(std::string name, int real_levels, int imag_levels)
{
    Constellation c{std::move(name), {}, 0};
    double energy = 0.0;
    for (int r = 0; r < real_levels; ++r)
        for (int i = 0; i < imag_levels; ++i) {
            const Complex point(2.0 * r - (real_levels - 1), 2.0 * i - (imag_levels - 1));
            energy += std::norm(point);
            c.symbols.push_back(point);
        }
    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(c.symbols.size()));
    for (auto& s : c.symbols)
        s *= scale;
    c.bits_per_symbol = static_cast<unsigned>(std::countr_zero(c.symbols.size()));
    return c;
}

} // namespace detail

inline Constellation build_constellation(std::string_view name)
{
    if (name == "bpsk")
        return {"bpsk", {Complex(1.0, 0.0), Complex(-1.0, 0.0)}, 1};
    if (name == "qpsk") {
        Constellation c{"qpsk", {}, 2};
        const double a = 1.0 / std::numbers::sqrt2;
        for (unsigned k = 0; k < 4; ++k) {
            const double bit1 = static_cast<double>((k >> 1) & 1u);
            const double bit0 = static_cast<double>(k & 1u);
            c.symbols.emplace_back((1.0 - 2.0 * bit1) * a, (1.0 - 2.0 * bit0) * a);
        }
        return c;
    }
    if (name == "qam8")
        return detail::rectangular_qam("qam8", 4, 2);
    if (name == "qam16")
        return detail::rectangular_qam("qam16", 4, 4);
    if (name == "qam32")
        return detail::rectangular_qam("qam32", 8, 4);
    throw Error(ErrorCode::unsupported_constellation,
                "'" + std::string(name) + "' (expected bpsk, qpsk, qam8, qam16 or qam32)");
}

/// Single-point alphabet {1}: spatial modulation degenerates to space-shift keying.
inline Constellation ssk_constellation()
{
    return {"ssk", {Complex(1.0, 0.0)}, 0};
}

inline Constellation constellation_by_name(std::string_view name)
{
    return name == "ssk" ? ssk_constellation() : build_constellation(name);
}

struct SmDimensions {
    unsigned n_t = 1;
    unsigned antenna_bits = 0;
    unsigned symbol_bits = 0;

    unsigned rate() const noexcept { return antenna_bits + symbol_bits; }
    std::size_t symbols() const noexcept { return std::size_t{1} << symbol_bits; }
    std::size_t labels() const noexcept { return std::size_t{1} << rate(); }
};

inline SmDimensions make_dimensions(unsigned n_t, std::size_t constellation_size)
{
    if (n_t == 0 || !std::has_single_bit(n_t))
        throw Error(ErrorCode::parameter,
                    "transmit antenna count must be a power of two, got " + std::to_string(n_t));
    if (constellation_size == 0 || !std::has_single_bit(constellation_size))
        throw Error(ErrorCode::parameter, "constellation size must be a power of two, got " +
                                              std::to_string(constellation_size));
    return {n_t, static_cast<unsigned>(std::countr_zero(n_t)),
            static_cast<unsigned>(std::countr_zero(constellation_size))};
}

inline SmDimensions make_dimensions(unsigned n_t, const Constellation& c)
{
    return make_dimensions(n_t, c.size());
}

using BitVector = std::vector<std::uint8_t>;

struct AntennaSymbol {
    std::size_t antenna = 0;
    std::size_t symbol = 0;

    friend bool operator==(const AntennaSymbol&, const AntennaSymbol&) = default;
};

/// Concatenated label: antenna bits followed by symbol bits.
inline std::uint64_t sm_label(std::size_t antenna, std::size_t symbol, const SmDimensions& dims)
{
    if (antenna >= dims.n_t || symbol >= dims.symbols())
        throw Error(ErrorCode::range, "antenna " + std::to_string(antenna) + " / symbol " +
                                          std::to_string(symbol) + " outside " +
                                          std::to_string(dims.n_t) + " x " +
                                          std::to_string(dims.symbols()));
    return (static_cast<std::uint64_t>(antenna) << dims.symbol_bits) | symbol;
}

inline AntennaSymbol split_label(std::uint64_t label, const SmDimensions& dims)
{
    return {static_cast<std::size_t>(label >> dims.symbol_bits),
            static_cast<std::size_t>(label & ((std::uint64_t{1} << dims.symbol_bits) - 1))};
}

inline AntennaSymbol split_bits(std::span<const std::uint8_t> bits, const SmDimensions& dims)
{
    if (bits.size() != dims.rate())
        throw Error(ErrorCode::framing, "expected " + std::to_string(dims.rate()) + " bits, got " +
                                            std::to_string(bits.size()));
    std::uint64_t label = 0;
    for (auto b : bits) {
        if (b > 1)
            throw Error(ErrorCode::framing, "bit values must be 0 or 1");
        label = (label << 1) | b;
    }
    return split_label(label, dims);
}

inline BitVector merge_bits(const AntennaSymbol& as, const SmDimensions& dims)
{
    const auto label = sm_label(as.antenna, as.symbol, dims);
    BitVector bits(dims.rate());
    for (unsigned i = 0; i < dims.rate(); ++i)
        bits[i] = static_cast<std::uint8_t>((label >> (dims.rate() - 1 - i)) & 1u);
    return bits;
}

/// Number of differing bits between the labels of (u, v) and (û, v̂).
inline unsigned hamming_label_distance(std::size_t u, std::size_t v, std::size_t u_hat,
                                       std::size_t v_hat, const SmDimensions& dims)
{
    return static_cast<unsigned>(
        std::popcount(sm_label(u, v, dims) ^ sm_label(u_hat, v_hat, dims)));
}

} // namespace smperf
