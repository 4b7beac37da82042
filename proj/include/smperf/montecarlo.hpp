#pragma once

// Link-level BER simulation. Frames are grouped into fixed-size blocks; block
// b of the point at snr_db always draws from make_stream(seed, {snr bits, b}),
// and the stopping decision scans blocks in index order. Worker count only
// changes how many surplus blocks get computed and thrown away, never the
// reported counters.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "smperf/analysis.hpp"
#include "smperf/channel.hpp"
#include "smperf/constellation.hpp"
#include "smperf/error.hpp"
#include "smperf/random.hpp"
#include "smperf/transceiver.hpp"

namespace smperf {

struct StoppingRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_frames = 100'000'000;

    void validate() const
    {
        if (min_bit_errors < 1)
            throw Error(ErrorCode::parameter, "min_bit_errors must be >= 1");
        if (max_frames < 1)
            throw Error(ErrorCode::parameter, "max_frames must be >= 1");
    }
};

struct SimPoint {
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double std_error = 0.0;        // from the per-frame error-count variance
    bool below_resolution = false; // frame cap reached with no bit errors
};

inline constexpr std::uint64_t kFramesPerBlock = 4096;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// requested > 0 wins, then SMPERF_THREADS (0 = auto), then hardware concurrency.
inline unsigned resolve_workers(unsigned requested = 0)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("SMPERF_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct BlockTally {
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t squared_errors = 0; // Σ (errors per frame)²
};

inline BlockTally run_block(const ChannelSpec& spec, const Constellation& c,
                            const SmDimensions& dims, double rho, std::uint64_t frames,
                            RandomStream rng)
{
    ChannelSampler sampler(spec);
    ComplexNormal normal;
    ComplexVector noise(static_cast<Eigen::Index>(spec.n_r()));
    ComplexVector y(static_cast<Eigen::Index>(spec.n_r()));
    std::uniform_int_distribution<std::uint64_t> label_dist(0, dims.labels() - 1);
    BlockTally t;
    for (std::uint64_t f = 0; f < frames; ++f) {
        const std::uint64_t label = label_dist(rng);
        const auto tx = split_label(label, dims);
        const ComplexMatrix& h = sampler.sample(rng);
        for (Eigen::Index i = 0; i < noise.size(); ++i)
            noise(i) = normal(rng);
        received_signal_into(tx.antenna, tx.symbol, h, c, rho, noise, y);
        const auto rx = ml_detect(y, h, c, rho);
        const auto errors =
            static_cast<std::uint64_t>(std::popcount(label ^ sm_label(rx.antenna, rx.symbol, dims)));
        t.bit_errors += errors;
        t.squared_errors += errors * errors;
    }
    t.frames = frames;
    return t;
}

} // namespace detail

inline SimPoint simulate_point(const ChannelSpec& spec, const Constellation& c, double snr_db,
                               const StoppingRule& rule, std::uint64_t master_seed,
                               unsigned workers = 0)
{
    rule.validate();
    if (!std::isfinite(snr_db))
        throw Error(ErrorCode::parameter, "SNR must be finite");
    const auto dims = make_dimensions(static_cast<unsigned>(spec.n_t()), c);
    if (dims.rate() == 0)
        throw Error(ErrorCode::parameter, "spectral efficiency is zero; nothing to simulate");
    const double rho = db_to_linear(snr_db);
    const std::uint64_t point_key = std::bit_cast<std::uint64_t>(snr_db);
    const std::uint64_t total_blocks = (rule.max_frames + kFramesPerBlock - 1) / kFramesPerBlock;
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(workers), total_blocks));

    std::atomic<std::uint64_t> next_block{0};
    std::atomic<std::uint64_t> stop_block{total_blocks}; // exclusive upper bound on useful blocks
    std::mutex mutex;
    std::map<std::uint64_t, detail::BlockTally> pending;
    std::uint64_t prefix_end = 0;
    detail::BlockTally prefix;
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            for (;;) {
                const std::uint64_t b = next_block.fetch_add(1);
                if (b >= stop_block.load())
                    return;
                const std::uint64_t frames =
                    std::min(kFramesPerBlock, rule.max_frames - b * kFramesPerBlock);
                auto tally = detail::run_block(spec, c, dims, rho, frames,
                                               make_stream(master_seed, {point_key, b}));
                std::lock_guard lock(mutex);
                pending.emplace(b, tally);
                while (prefix_end < stop_block.load()) {
                    auto it = pending.find(prefix_end);
                    if (it == pending.end())
                        break;
                    prefix.frames += it->second.frames;
                    prefix.bit_errors += it->second.bit_errors;
                    prefix.squared_errors += it->second.squared_errors;
                    pending.erase(it);
                    ++prefix_end;
                    if (prefix.bit_errors >= rule.min_bit_errors)
                        stop_block.store(prefix_end);
                }
            }
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure)
                failure = std::current_exception();
            stop_block.store(0);
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    SimPoint p;
    p.snr_db = snr_db;
    p.frames = prefix.frames;
    p.bit_errors = prefix.bit_errors;
    const double bits = static_cast<double>(p.frames) * dims.rate();
    p.ber = static_cast<double>(p.bit_errors) / bits;
    if (p.frames > 1) {
        const double n = static_cast<double>(p.frames);
        const double mean = static_cast<double>(p.bit_errors) / n;
        const double var =
            std::max(0.0, (static_cast<double>(prefix.squared_errors) / n - mean * mean) * n / (n - 1.0));
        p.std_error = std::sqrt(var / n) / dims.rate();
    }
    p.below_resolution = p.bit_errors == 0;
    return p;
}

struct CurvePoint {
    double snr_db = 0.0;
    std::optional<AbepBound> bound;
    std::optional<SimPoint> sim;
};

struct BerCurve {
    std::string constellation;
    unsigned rate = 0;
    std::vector<CurvePoint> points;
};

enum class SweepParts { bound, sim, both };

inline void check_snr_grid(const std::vector<double>& grid)
{
    if (grid.empty())
        throw Error(ErrorCode::parameter, "SNR grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw Error(ErrorCode::parameter, "SNR grid contains a non-finite value");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw Error(ErrorCode::parameter, "SNR grid must be strictly ascending");
    }
}

/// Simulated BER and analytical bound per grid point. `on_point` (if set) is
/// called after each point, in grid order.
template <class OnPoint = std::nullptr_t>
BerCurve sweep(const ChannelSpec& spec, const Constellation& c, const std::vector<double>& snr_grid,
               const StoppingRule& rule, std::uint64_t master_seed, const BoundConfig& cfg = {},
               SweepParts parts = SweepParts::both, unsigned workers = 0,
               OnPoint&& on_point = nullptr)
{
    check_snr_grid(snr_grid);
    rule.validate();
    cfg.validate();
    BerCurve curve;
    curve.constellation = c.name;
    curve.rate = make_dimensions(static_cast<unsigned>(spec.n_t()), c).rate();
    for (double snr_db : snr_grid) {
        CurvePoint pt;
        pt.snr_db = snr_db;
        if (parts != SweepParts::sim)
            pt.bound = bound_for(spec, c, db_to_linear(snr_db), cfg);
        if (parts != SweepParts::bound)
            pt.sim = simulate_point(spec, c, snr_db, rule, master_seed, workers);
        curve.points.push_back(pt);
        if constexpr (!std::is_same_v<std::decay_t<OnPoint>, std::nullptr_t>)
            on_point(curve.points.back());
    }
    return curve;
}

} // namespace smperf
