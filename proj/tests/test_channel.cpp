#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "smperf/channel.hpp"

using namespace smperf;
using Catch::Matchers::WithinAbs;

TEST_CASE("exponential correlation matrices", "[channel]")
{
    CHECK(max_abs_difference(exponential_correlation(4, 0.0).matrix(), ComplexMatrix::Identity(4, 4)) == 0.0);

    const auto m = exponential_correlation(4, 0.8);
    CHECK_THAT(m.matrix()(0, 3).real(), WithinAbs(0.512, 1e-15));
    CHECK_THAT(m.matrix()(3, 0).real(), WithinAbs(0.512, 1e-15));

    const auto two = exponential_correlation(2, 0.5);
    CHECK_THAT(two.eigenvalues()(0), WithinAbs(0.5, 1e-14));
    CHECK_THAT(two.eigenvalues()(1), WithinAbs(1.5, 1e-14));

    for (double g : {-0.9, -0.3, 0.1, 0.5, 0.8, 0.9, 0.99})
        for (std::size_t n : {1u, 2u, 4u, 8u}) {
            const auto s = exponential_correlation(n, g);
            for (Eigen::Index i = 0; i < s.size(); ++i)
                CHECK(s.matrix()(i, i) == Complex(1.0, 0.0));
            CHECK(max_abs_difference(s.matrix(), s.matrix().adjoint()) == 0.0);
            CHECK(s.eigenvalues().minCoeff() >= 0.0);
        }

    for (double g : {1.0, -1.0, 1.5})
        try {
            exponential_correlation(4, g);
            FAIL("|gamma| >= 1 accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::parameter);
        }
}

TEST_CASE("ChannelSpec validation", "[channel]")
{
    CHECK_THROWS_AS(ChannelSpec::uncorrelated(4, 4, -1.0), Error);
    ComplexMatrix not_unit = ComplexMatrix::Identity(2, 2) * 2.0;
    CHECK_THROWS_AS(ChannelSpec(0.0, HermitianPsdMatrix(not_unit), HermitianPsdMatrix::identity(2)), Error);

    // Fully correlated transmit side is a valid (singular) spec.
    const ChannelSpec full(0.0, HermitianPsdMatrix(ComplexMatrix::Ones(4, 4)), HermitianPsdMatrix::identity(2));
    CHECK(full.n_t() == 4);
    CHECK(full.n_r() == 2);
}

TEST_CASE("large K collapses to the all-ones channel", "[channel]")
{
    const auto spec = ChannelSpec::exponential(4, 4, 1e12, 0.5, 0.5);
    auto rng = make_stream(1, {});
    for (int i = 0; i < 100; ++i) {
        const auto h = sample_channel(spec, rng);
        CHECK(max_abs_difference(h, ComplexMatrix::Ones(4, 4)) < 1e-5);
    }
}

TEST_CASE("sample covariance of vec(H) follows the Kronecker model", "[channel][statistical]")
{
    const std::size_t draws = 100000;
    SECTION("uncorrelated Rayleigh")
    {
        const auto spec = ChannelSpec::uncorrelated(4, 4, 0.0);
        ChannelSampler sampler(spec);
        auto rng = make_stream(21, {});
        const auto mom = estimate_vec_moments([&] { return ComplexMatrix(sampler.sample(rng)); }, draws);
        CHECK(max_abs_difference(mom.covariance, ComplexMatrix::Identity(16, 16)) < 0.02);
    }
    SECTION("exponential correlation, Rayleigh")
    {
        const auto spec = ChannelSpec::exponential(4, 4, 0.0, 0.8, 0.5);
        ChannelSampler sampler(spec);
        auto rng = make_stream(22, {});
        const auto mom = estimate_vec_moments([&] { return ComplexMatrix(sampler.sample(rng)); }, draws);
        const ComplexMatrix expected = kronecker(spec.sigma_t().matrix(), spec.sigma_r().matrix());
        CHECK(max_abs_difference(mom.covariance, expected) < 0.02);
    }
    SECTION("Rician mean and scattered covariance")
    {
        const double k = 5.0;
        const auto spec = ChannelSpec::exponential(4, 4, k, 0.9, 0.1);
        ChannelSampler sampler(spec);
        auto rng = make_stream(23, {});
        const auto mom = estimate_vec_moments([&] { return ComplexMatrix(sampler.sample(rng)); }, draws);
        const double gate = 5.0 / std::sqrt(static_cast<double>(draws));
        CHECK(max_abs_difference(mom.mean, ComplexVector::Constant(16, std::sqrt(k / (k + 1.0)))) <= gate);
        CHECK(max_abs_difference(mom.covariance, spec.vec_covariance()) < 0.02 / (k + 1.0));
    }
}

TEST_CASE("properness gate", "[channel][statistical]")
{
    const std::size_t draws = 100000;
    SECTION("uncorrelated Rayleigh passes")
    {
        auto rng = make_stream(31, {});
        const auto r = validate_properness(ChannelSpec::uncorrelated(4, 4, 0.0), draws, rng);
        CHECK(r.pass);
        CHECK(r.max_pseudo_covariance < 0.016);
    }
    SECTION("correlated Rician passes once the mean is removed")
    {
        auto rng = make_stream(32, {});
        const auto r = validate_properness(ChannelSpec::exponential(4, 4, 5.0, 0.8, 0.8), draws, rng);
        CHECK(r.pass);
    }
    SECTION("a sampler with imaginary variance 1 instead of 1/2 fails")
    {
        auto rng = make_stream(33, {});
        std::normal_distribution<double> re(0.0, std::sqrt(0.5));
        std::normal_distribution<double> im(0.0, 1.0);
        auto broken = [&] {
            ComplexMatrix h(2, 2);
            for (Eigen::Index i = 0; i < h.size(); ++i)
                h(i) = Complex(re(rng), im(rng));
            return h;
        };
        const auto r = check_properness(broken, draws);
        CHECK_FALSE(r.pass);
        CHECK_THAT(r.max_pseudo_covariance, WithinAbs(0.5, 0.05));
    }
    SECTION("too few draws")
    {
        auto rng = make_stream(34, {});
        CHECK_THROWS_AS(validate_properness(ChannelSpec::uncorrelated(2, 2, 0.0), 100, rng), Error);
    }
}
