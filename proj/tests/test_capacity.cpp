// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <beamsquint/capacity.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace bs = beamsquint;

namespace
{
    // Half-power half-widths N * x_3dB, solved to 20 digits with arbitrary precision arithmetic.
    struct FrozenHalfWidth
    {
        int n;
        double scaled;
    };
    constexpr FrozenHalfWidth kHalfPowerHalfWidths[] = {
        {2, 1.0},
        {16, 0.88739003964698645211},
        {32, 0.88626651450141396202},
        {64, 0.8859862909316351137},
        {128, 0.88591627603584487268},
    };
} // namespace

TEST(BandConfig, DerivesFractionalBandwidth)
{
    const auto band = bs::BandConfig::absolute(2.5e9, 73e9, 2048, 1.0);
    EXPECT_NEAR(band.fractional_bandwidth(), 2.5 / 73, 1e-12 * 2.5 / 73);
    EXPECT_EQ(band.bandwidth(), 2.5e9);
    EXPECT_EQ(band.n_subcarriers(), 2048);
}

TEST(BandConfig, DimensionlessModeUsesUnitBandwidth)
{
    const auto band = bs::BandConfig::fractional(0.03, 16, 2.0);
    EXPECT_EQ(band.bandwidth(), 1.0);
    EXPECT_FALSE(band.bandwidth_hz());
}

TEST(BandConfig, RejectsInconsistentOrInvalidInput)
{
    EXPECT_THROW(bs::BandConfig(0.05, 16, 1.0, 2.5e9, 73e9), bs::ConfigError);
    EXPECT_THROW(bs::BandConfig::fractional(0.05, 16, 0.0), bs::ConfigError);
    EXPECT_THROW(bs::BandConfig::fractional(0.05, 16, -1.0), bs::ConfigError);
    EXPECT_THROW(bs::BandConfig::fractional(0.05, 15, 1.0), bs::ConfigError);
    EXPECT_THROW(bs::BandConfig::fractional(2.5, 16, 1.0), bs::ConfigError);
    EXPECT_NO_THROW(bs::BandConfig(2.5 / 73, 16, 1.0, 2.5e9, 73e9));
}

TEST(BandConfig, RescaleKeepsCarrier)
{
    const auto band = bs::BandConfig::absolute(2.5e9, 73e9, 64, 1.0).with_fractional_bandwidth(0.01);
    EXPECT_DOUBLE_EQ(*band.bandwidth_hz(), 0.73e9);
    EXPECT_EQ(band.fractional_bandwidth(), 0.01);
}

TEST(CapacityBs, BroadsideIsPeakForAnyBandwidth)
{
    const bs::ArrayConfig arr(16);
    for (double b : {0.0, 0.03, 0.3, 1.2})
    {
        const auto band = bs::BandConfig::fractional(b, 2048, 1.0);
        EXPECT_NEAR(bs::capacity_bs(0.0, 0.0, band, arr), std::log2(17.0), 1e-12) << b;
    }
}

TEST(CapacityBs, AbsoluteBandwidthScales)
{
    const bs::ArrayConfig arr(16);
    const auto band = bs::BandConfig::absolute(2e9, 28e9, 256, 1.0);
    EXPECT_NEAR(bs::capacity_bs(0.0, 0.0, band, arr), 2e9 * std::log2(17.0), 1e-3);
    EXPECT_NEAR(bs::spectral_efficiency_bs(0.0, 0.0, band, arr), std::log2(17.0), 1e-12);
}

TEST(CapacityBs, ZeroBandwidthEqualsNoSquintBitForBit)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);
    const auto band = bs::BandConfig::fractional(0.0, 2048, 1.7);
    for (int n : {4, 17, 64})
    {
        const bs::ArrayConfig arr(n);
        for (int i = 0; i < 200; ++i)
        {
            const double f = angle(rng), p = angle(rng);
            EXPECT_EQ(bs::capacity_bs(f, p, band, arr), bs::capacity_nbs(f, p, band, arr));
        }
    }
}

TEST(CapacityBs, MatchesOracleSum)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(-1.0, 1.0), bw(0.0, 0.2);
    for (int n : {8, 33, 64})
    {
        const bs::ArrayConfig arr(n);
        for (int i = 0; i < 40; ++i)
        {
            const double b = bw(rng), f = angle(rng);
            const double p = std::clamp(f + 0.02 * angle(rng), -1.0, 1.0);
            const auto band = bs::BandConfig::fractional(b, 512, 1.0);
            const double expected = oracle::capacity(f, p, oracle::subcarrier_ratios(b, 512), 1.0, n);
            EXPECT_NEAR(bs::capacity_bs(f, p, band, arr), expected, 1e-10 * std::max(expected, 1.0));
        }
    }
}

TEST(CapacityBs, ReflectionInvariance)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> angle(-1.0, 1.0), bw(0.0, 0.1);
    const bs::ArrayConfig arr(32);
    for (int i = 0; i < 100; ++i)
    {
        const auto band = bs::BandConfig::fractional(bw(rng), 2048, 1.0);
        const double f = angle(rng), p = angle(rng);
        EXPECT_NEAR(bs::capacity_bs(f, p, band, arr), bs::capacity_bs(-f, -p, band, arr), 1e-12);
    }
}

TEST(CapacityBs, DomainChecks)
{
    const bs::ArrayConfig arr(8);
    const auto band = bs::BandConfig::fractional(0.01, 16, 1.0);
    EXPECT_THROW(bs::capacity_bs(1.2, 0.0, band, arr), bs::DomainError);
    EXPECT_THROW(bs::capacity_nbs(0.0, -1.01, band, arr), bs::DomainError);
}

TEST(CapacityNbs, PeakNullAndHalfPower)
{
    const auto band = bs::BandConfig::fractional(0.0, 2, 1.0);
    const bs::ArrayConfig arr(64);
    EXPECT_DOUBLE_EQ(bs::capacity_nbs(0.3, 0.3, band, arr), std::log2(65.0));
    EXPECT_NEAR(bs::capacity_nbs(0.3, 0.3 + 2.0 / 64, band, arr), 0.0, 1e-12);
    const double x3db = 0.8859862909316351137 / 64;
    EXPECT_NEAR(bs::capacity_nbs(0.1, 0.1 + x3db, band, arr), std::log2(1.0 + 32.0), 1e-9);
    EXPECT_NEAR(bs::capacity_nbs(0.1, 0.1 + 0.886 / 64, band, arr), std::log2(33.0), 1e-3);
}

TEST(SpectralEfficiency, BroadsideAndZeroBandwidth)
{
    const bs::ArrayConfig arr(16);
    const auto wide = bs::BandConfig::fractional(0.05, 2048, 3.0);
    EXPECT_NEAR(bs::spectral_efficiency_bs(0, 0, wide, arr), std::log2(1 + 16 * 3.0), 1e-12);
    const auto narrow = bs::BandConfig::absolute(1e3, 73e9, 2048, 3.0);
    const auto flat = bs::BandConfig(0.0, 2048, 3.0);
    EXPECT_NEAR(bs::spectral_efficiency_bs(0.2, 0.25, flat, arr),
                bs::capacity_nbs(0.2, 0.25, flat, arr), 0.0);
    EXPECT_NEAR(bs::spectral_efficiency_bs(0.2, 0.21, narrow, arr),
                bs::capacity_nbs(0.2, 0.21, flat, arr), 1e-9);
}

TEST(SpectralEfficiency, DecreasesWithBandwidthExample)
{
    const bs::ArrayConfig arr(64);
    const auto b1 = bs::BandConfig::fractional(0.01, 2048, 1.0);
    const auto b2 = bs::BandConfig::fractional(0.05, 2048, 1.0);
    for (double psi : {0.0, 0.2, 0.6, 0.9})
        EXPECT_GE(bs::spectral_efficiency_bs(psi, psi, b1, arr), bs::spectral_efficiency_bs(psi, psi, b2, arr) - 1e-12);
    EXPECT_GT(bs::spectral_efficiency_bs(0.9, 0.9, b1, arr), bs::spectral_efficiency_bs(0.9, 0.9, b2, arr));
}

TEST(CapacityThreshold, Values)
{
    const bs::ArrayConfig arr(16);
    const auto band = bs::BandConfig::fractional(0.0, 2, 1.0);
    EXPECT_NEAR(bs::capacity_threshold(std::numbers::sqrt2 / 2, band, arr), std::log2(9.0), 1e-14);
    EXPECT_EQ(bs::capacity_threshold_3db(band, arr), bs::capacity_threshold(bs::kHalfPowerRatio, band, arr));
    EXPECT_NEAR(bs::capacity_threshold(0.999999, band, arr), std::log2(17.0), 1e-5);
    EXPECT_LT(bs::capacity_threshold(0.999999, band, arr), std::log2(17.0));
    EXPECT_THROW(bs::capacity_threshold(0.0, band, arr), bs::DomainError);
    EXPECT_THROW(bs::capacity_threshold(1.0, band, arr), bs::DomainError);
}

TEST(CapacityThreshold, EqualsNoSquintCapacityAtRegionEdge)
{
    const bs::ArrayConfig arr(32);
    const auto band = bs::BandConfig::fractional(0.02, 64, 0.5);
    for (double r : {0.3, 0.5, bs::kHalfPowerRatio, 0.9})
    {
        for (double f : {-0.4, 0.0, 0.7})
        {
            const auto region = bs::gain_region(f, r, arr);
            EXPECT_NEAR(bs::capacity_nbs(f, region.hi, band, arr), bs::capacity_threshold(r, band, arr), 1e-8);
            EXPECT_NEAR(bs::capacity_nbs(f, region.lo, band, arr), bs::capacity_threshold(r, band, arr), 1e-8);
        }
    }
}

TEST(GainRegion, HalfPowerMatchesFrozenValues)
{
    for (const auto &[n, scaled] : kHalfPowerHalfWidths)
    {
        const auto region = bs::gain_region(0.0, bs::kHalfPowerRatio, bs::ArrayConfig(n));
        EXPECT_NEAR(region.half_width, scaled / n, 2e-10) << n;
        EXPECT_DOUBLE_EQ(region.hi, region.half_width);
        EXPECT_DOUBLE_EQ(region.lo, -region.half_width);
    }
}

TEST(GainRegion, HalfWidthMatchesBisectionOracle)
{
    for (int n : {2, 16, 64, 128})
    {
        const double target = std::numbers::sqrt2 / 2 * std::sqrt(static_cast<double>(n));
        const double expected = oracle::bisect(
            [&](double x) { return std::abs(oracle::array_sum_gain(x, n)) - target; }, 1e-9, 2.0 / n);
        EXPECT_NEAR(bs::main_lobe_half_width(bs::kHalfPowerRatio, bs::ArrayConfig(n)), expected, 1e-6) << n;
    }
}

TEST(GainRegion, EdgesMeetGainRatio)
{
    const bs::ArrayConfig arr(40);
    for (double r : {0.26, 0.5, 0.95})
    {
        const auto region = bs::gain_region(0.2, r, arr);
        EXPECT_NEAR(bs::gain_mag(region.hi - 0.2, arr), r * arr.max_gain(), 1e-7);
        EXPECT_NEAR(bs::gain_mag(region.lo - 0.2, arr), r * arr.max_gain(), 1e-7);
        EXPECT_NEAR(region.hi - 0.2, 0.2 - region.lo, 1e-15);
        EXPECT_LE(region.lo, 0.2);
        EXPECT_GE(region.hi, 0.2);
    }
}

TEST(GainRegion, ClippedAtEndfire)
{
    const auto region = bs::gain_region(1.0, bs::kHalfPowerRatio, bs::ArrayConfig(64));
    EXPECT_EQ(region.hi, 1.0);
    EXPECT_NEAR(region.lo, 1.0 - 0.8859862909316351137 / 64, 1e-9);
}

TEST(GainRegion, RatioRestrictions)
{
    const bs::ArrayConfig arr(16);
    EXPECT_THROW(bs::gain_region(0.0, 0.2, arr), bs::ConfigError);
    EXPECT_THROW(bs::gain_region(0.0, 0.0, arr), bs::DomainError);
    EXPECT_THROW(bs::gain_region(0.0, 1.0, arr), bs::DomainError);
    EXPECT_THROW(bs::gain_region(1.5, 0.5, arr), bs::DomainError);
}

TEST(BeamwidthNbs, HalfPowerWidth)
{
    const bs::ArrayConfig arr(64);
    const auto band = bs::BandConfig::fractional(0.03, 64, 1.0);
    const double c_t = bs::capacity_threshold_3db(band, arr);
    EXPECT_NEAR(bs::beamwidth_nbs(c_t, band, arr), 2 * 0.8859862909316351137 / 64, 1e-9);
    EXPECT_NEAR(bs::beamwidth_nbs(c_t, band, arr) * 64, 1.772, 1e-3);
}

TEST(BeamwidthNbs, EquivalentToGainRegion)
{
    const bs::ArrayConfig arr(24);
    const auto band = bs::BandConfig::absolute(1e9, 30e9, 64, 4.0);
    for (double r : {0.3, 0.6, 0.8})
    {
        const double width = bs::beamwidth_nbs(bs::capacity_threshold(r, band, arr), band, arr);
        EXPECT_NEAR(width, 2 * bs::gain_region(0.0, r, arr).half_width, 1e-9);
    }
}

TEST(BeamwidthNbs, ShrinksToZeroAtPeak)
{
    const bs::ArrayConfig arr(16);
    const auto band = bs::BandConfig::fractional(0.0, 2, 1.0);
    const double peak = bs::peak_capacity(band, arr);
    EXPECT_LT(bs::beamwidth_nbs(peak * (1 - 1e-9), band, arr), 1e-3);
    EXPECT_THROW(bs::beamwidth_nbs(peak, band, arr), bs::InfeasibleError);
    EXPECT_THROW(bs::beamwidth_nbs(peak * 1.1, band, arr), bs::InfeasibleError);
}

TEST(ConcaveSquintRange, KeepsEveryPointingErrorInside)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angle(-1.0, 1.0), bw(0.0, 0.1), unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i)
    {
        const int n = 4 + static_cast<int>(rng() % 125);
        const bs::ArrayConfig arr(n);
        const double b = bw(rng), f = angle(rng);
        const double a = 4.0 / (n * std::numbers::pi);
        for (const auto &iv : bs::concave_squint_range(f, b, arr))
        {
            ASSERT_LE(iv.lo, iv.hi);
            const double psi = iv.lo + (iv.hi - iv.lo) * unit(rng);
            for (double xi : {1 - b / 2, 1.0, 1 + b / 2})
                EXPECT_LE(std::abs(xi * psi - f), a * (1 + 1e-12));
        }
    }
}

TEST(ConcaveSquintRange, MatchesPositiveAngleFormula)
{
    const bs::ArrayConfig arr(32);
    const double a = 4.0 / (32 * std::numbers::pi);
    const auto ranges = bs::concave_squint_range(0.5, 0.04, arr);
    ASSERT_EQ(ranges.size(), 1u);
    EXPECT_DOUBLE_EQ(ranges[0].lo, (0.5 - a) / 0.98);
    EXPECT_DOUBLE_EQ(ranges[0].hi, (0.5 + a) / 1.02);
    EXPECT_TRUE(bs::concave_squint_range(1.0, 0.5, arr).empty());
}

// Squint can only lose capacity inside the concave range, and loses nothing at broadside.
TEST(CapacityProperty, SquintNeverHelpsInConcaveRange)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(-1.0, 1.0), bw(0.0, 0.1), unit(0.0, 1.0);
    int checked = 0;
    while (checked < 1000)
    {
        const int n = 4 + static_cast<int>(rng() % 125);
        const bs::ArrayConfig arr(n);
        const auto band = bs::BandConfig::fractional(bw(rng), 2048, 1.0);
        const double f = angle(rng);
        const auto ranges = bs::concave_squint_range(f, band.fractional_bandwidth(), arr);
        if (ranges.empty())
            continue;
        const auto &iv = ranges[rng() % ranges.size()];
        const double psi = iv.lo + (iv.hi - iv.lo) * unit(rng);
        const double nbs = bs::capacity_nbs(f, psi, band, arr);
        EXPECT_LE(bs::capacity_bs(f, psi, band, arr), nbs * (1 + 1e-9));
        const double nbs0 = bs::capacity_nbs(f, 0.0, band, arr);
        EXPECT_LT(std::abs(bs::capacity_bs(f, 0.0, band, arr) - nbs0), 1e-9 * nbs0);
        ++checked;
    }
}

TEST(CapacityProperty, DecreasesAwayFromFocusOnRightSide)
{
    const bs::ArrayConfig arr(32);
    const auto band = bs::BandConfig::fractional(0.0342, 2048, 1.0);
    const double half = 0.5 * bs::beamwidth_nbs(bs::capacity_threshold_3db(band, arr), band, arr);
    for (double f : {0.0, 0.3, 0.7, 0.95})
    {
        double prev = bs::capacity_bs(f, f, band, arr);
        for (int i = 1; i < 400; ++i)
        {
            const double psi = f + half * i / 400.0;
            if (psi > 1.0)
                break;
            const double c = bs::capacity_bs(f, psi, band, arr);
            EXPECT_LT(c, prev) << "f=" << f << " psi=" << psi;
            prev = c;
        }
    }
}

// The argmax over psi of the squinted capacity drifts slightly towards broadside.
TEST(CapacityProperty, ArgmaxStaysNearFocus)
{
    const bs::ArrayConfig arr(64);
    const auto band = bs::BandConfig::fractional(0.0342, 2048, 1.0);
    const double half = bs::main_lobe_half_width(bs::kHalfPowerRatio, arr);
    for (double f : {0.0, 0.5, 0.9})
    {
        double best = -1.0, best_psi = 0.0;
        for (int i = -500; i <= 500; ++i)
        {
            const double psi = std::clamp(f + half * i / 500.0, -1.0, 1.0);
            const double c = bs::capacity_bs(f, psi, band, arr);
            if (c > best)
            {
                best = c;
                best_psi = psi;
            }
        }
        EXPECT_LE(std::abs(best_psi - f), 0.1 * half) << f;
        EXPECT_LE(best_psi, f + 1e-15);
    }
}
