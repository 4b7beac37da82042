#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "smperf/numerics.hpp"

namespace smperf {

using RandomStream = std::mt19937_64;

/// Independent stream for (master_seed, keys...). Keys identify the trial
/// (e.g. SNR point and block counter), never the worker that runs it.
inline RandomStream make_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * keys.size());
    auto push = [&words](std::uint64_t x) {
        words.push_back(static_cast<std::uint32_t>(x & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(x >> 32));
    };
    push(master_seed);
    for (auto k : keys)
        push(k);
    std::seed_seq seq(words.begin(), words.end());
    return RandomStream(seq);
}

/// CN(0, 1) draws: real and imaginary parts each N(0, 1/2).
class ComplexNormal {
public:
    Complex operator()(RandomStream& rng) { return {normal_(rng), normal_(rng)}; }

private:
    std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

} // namespace smperf
