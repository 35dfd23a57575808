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


#ifndef BEAMSQUINT_CAPACITY_HPP
#define BEAMSQUINT_CAPACITY_HPP

#include "array_model.hpp"
#include "bisection.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace beamsquint
{
    /// Ratio r = sqrt(2)/2: array gain 3 dB below its peak.
    inline constexpr double kHalfPowerRatio = std::numbers::sqrt2 / 2.0;

    /// Smallest gain ratio accepted for main-lobe regions. Below it the first
    /// sidelobe (about 0.217 sqrt(N)) would also qualify.
    inline constexpr double kMinMainLobeRatio = 0.25;

    /// OFDM band description.
    ///
    /// `snr` is the linear ratio P / (B sigma^2) and is held fixed when the band
    /// is rescaled. When no absolute bandwidth is known, capacities are reported
    /// per unit bandwidth (B = 1).
    class BandConfig
    {
    public:
        BandConfig(double fractional_bandwidth, int n_subcarriers, double snr,
                   std::optional<double> bandwidth_hz = std::nullopt,
                   std::optional<double> carrier_hz = std::nullopt)
            : grid_(std::make_shared<const SubcarrierGrid>(fractional_bandwidth, n_subcarriers)),
              snr_(snr), bandwidth_hz_(bandwidth_hz), carrier_hz_(carrier_hz)
        {
            if (!(snr > 0.0) || !std::isfinite(snr))
                throw ConfigError("snr must be a positive finite ratio");
            if (bandwidth_hz && !(*bandwidth_hz > 0.0))
                throw ConfigError("bandwidth must be positive");
            if (carrier_hz && !(*carrier_hz > 0.0))
                throw ConfigError("carrier frequency must be positive");
            if (bandwidth_hz && carrier_hz)
            {
                const double expected = *bandwidth_hz / *carrier_hz;
                if (std::abs(expected - fractional_bandwidth) > 1e-12 * std::max(expected, 1e-300))
                    throw ConfigError("fractional bandwidth disagrees with bandwidth / carrier");
            }
        }

        /// Dimensionless band: capacities per unit bandwidth.
        static BandConfig fractional(double b, int n_subcarriers, double snr)
        {
            return BandConfig(b, n_subcarriers, snr);
        }

        /// Band from absolute bandwidth and carrier; b = B / f_c.
        static BandConfig absolute(double bandwidth_hz, double carrier_hz, int n_subcarriers, double snr)
        {
            if (!(carrier_hz > 0.0))
                throw ConfigError("carrier frequency must be positive");
            return BandConfig(bandwidth_hz / carrier_hz, n_subcarriers, snr, bandwidth_hz, carrier_hz);
        }

        double fractional_bandwidth() const noexcept { return grid_->fractional_bandwidth(); }
        int n_subcarriers() const noexcept { return static_cast<int>(grid_->size()); }
        double snr() const noexcept { return snr_; }
        std::optional<double> bandwidth_hz() const noexcept { return bandwidth_hz_; }
        std::optional<double> carrier_hz() const noexcept { return carrier_hz_; }
        const SubcarrierGrid &grid() const noexcept { return *grid_; }

        /// Capacity scale B; 1 in dimensionless mode.
        double bandwidth() const noexcept { return bandwidth_hz_.value_or(1.0); }

        /// Same subcarrier count and snr with a different fractional bandwidth.
        /// A known carrier is kept and the absolute bandwidth follows it.
        BandConfig with_fractional_bandwidth(double b) const
        {
            if (carrier_hz_)
                return BandConfig(b, n_subcarriers(), snr_, b * *carrier_hz_, carrier_hz_);
            return BandConfig(b, n_subcarriers(), snr_);
        }

    private:
        std::shared_ptr<const SubcarrierGrid> grid_;
        double snr_;
        std::optional<double> bandwidth_hz_;
        std::optional<double> carrier_hz_;
    };

    /// Angles around a focus where the carrier gain is at least r sqrt(N), clipped to [-1, 1].
    struct GainRegion
    {
        double psi_f = 0.0;
        double r = 0.0;
        double lo = 0.0;
        double hi = 0.0;
        double half_width = 0.0; // unclipped
    };

    namespace detail
    {
        inline void require_angle(double psi, const char *name)
        {
            if (!(psi >= -1.0 && psi <= 1.0))
                throw DomainError(std::string(name) + " must lie in [-1, 1]");
        }

        inline void require_ratio(double r)
        {
            if (!(r > 0.0 && r < 1.0))
                throw DomainError("gain ratio r must lie in (0, 1)");
        }

        inline double capacity_nbs(double psi_f, double psi, const BandConfig &band, int n)
        {
            return band.bandwidth() * std::log2(1.0 + band.snr() * gain_power(psi - psi_f, n));
        }

        // Squint-aware capacity for any real angles; the solvers probe past |psi| = 1.
        inline double capacity_bs(double psi_f, double psi, const BandConfig &band, int n)
        {
            const SubcarrierGrid &grid = band.grid();
            if (grid.collapsed())
                return capacity_nbs(psi_f, psi, band, n);

            const double snr = band.snr();
            double sum = 0.0;
            for (const double xi : grid.ratios())
                sum += std::log2(1.0 + snr * gain_power(xi * psi - psi_f, n));
            return band.bandwidth() * sum / static_cast<double>(grid.size());
        }
    } // namespace detail

    /// Capacity over all subcarriers with fixed carrier-frequency phase shifts.
    inline double capacity_bs(double psi_f, double psi, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        detail::require_angle(psi, "angle of arrival");
        return detail::capacity_bs(psi_f, psi, band, arr.n_antennas());
    }

    /// Capacity with frequency-independent gain (true time delay).
    inline double capacity_nbs(double psi_f, double psi, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        detail::require_angle(psi, "angle of arrival");
        return detail::capacity_nbs(psi_f, psi, band, arr.n_antennas());
    }

    /// Capacity with squint per unit bandwidth, in bits/s/Hz.
    inline double spectral_efficiency_bs(double psi_f, double psi, const BandConfig &band,
                                         const ArrayConfig &arr)
    {
        return capacity_bs(psi_f, psi, band, arr) / band.bandwidth();
    }

    /// Squint-free capacity at the angle where gain equals r sqrt(N).
    inline double capacity_threshold(double r, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_ratio(r);
        return band.bandwidth() * std::log2(1.0 + r * r * arr.n_antennas() * band.snr());
    }

    inline double capacity_threshold_3db(const BandConfig &band, const ArrayConfig &arr)
    {
        return capacity_threshold(kHalfPowerRatio, band, arr);
    }

    /// Peak capacity B log2(1 + N snr).
    inline double peak_capacity(const BandConfig &band, const ArrayConfig &arr)
    {
        return band.bandwidth() * std::log2(1.0 + arr.n_antennas() * band.snr());
    }

    /// Offset x in (0, 2/N) where the main lobe falls to r sqrt(N).
    /// The returned value is on the inner side: gain_mag(x) >= r sqrt(N).
    inline double main_lobe_half_width(double r, const ArrayConfig &arr,
                                       const BisectionOptions &options = {})
    {
        detail::require_ratio(r);
        if (r < kMinMainLobeRatio)
            throw ConfigError("gain ratio below 0.25 reaches the sidelobes; only the main lobe is supported");

        const int n = arr.n_antennas();
        const double threshold = r * arr.max_gain();
        return bisect_boundary([&](double x) { return std::abs(detail::gain_amplitude(x, n)) >= threshold; },
                               0.0, 2.0 / n, options);
    }

    inline GainRegion gain_region(double psi_f, double r, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        const double w = main_lobe_half_width(r, arr);
        return GainRegion{psi_f, r, std::max(psi_f - w, -1.0), std::min(psi_f + w, 1.0), w};
    }

    /// Gain ratio at which the squint-free capacity equals `c_t`.
    inline double equivalent_gain_ratio(double c_t, const BandConfig &band, const ArrayConfig &arr)
    {
        if (!(c_t > 0.0))
            throw DomainError("capacity threshold must be positive");
        if (c_t >= peak_capacity(band, arr))
            throw InfeasibleError("capacity threshold is not below the peak capacity", 0.0);
        const double gain_sq = (std::exp2(c_t / band.bandwidth()) - 1.0) / (arr.n_antennas() * band.snr());
        return std::sqrt(gain_sq);
    }

    struct AngleInterval
    {
        double lo = 0.0;
        double hi = 0.0;
    };

    /// Angles psi in [-1, 1] at which every subcarrier's pointing error xi psi - psi_f
    /// stays inside [-4/(N pi), 4/(N pi)], where the gain is strictly concave.
    ///
    /// For psi >= 0 this is [(psi_f - a)/(1 - b/2), (psi_f + a)/(1 + b/2)]; negative
    /// angles use the mirrored bounds since the extreme subcarriers swap roles. Returns
    /// zero, one or (for a focus near broadside) two intervals.
    inline std::vector<AngleInterval> concave_squint_range(double psi_f, double b, const ArrayConfig &arr)
    {
        const double a = 4.0 / (arr.n_antennas() * std::numbers::pi);
        std::vector<AngleInterval> out;
        const double neg_lo = std::max((psi_f - a) / (1.0 + b / 2.0), -1.0);
        const double neg_hi = std::min((psi_f + a) / (1.0 - b / 2.0), 0.0);
        if (neg_lo <= neg_hi)
            out.push_back({neg_lo, neg_hi});
        const double pos_lo = std::max((psi_f - a) / (1.0 - b / 2.0), 0.0);
        const double pos_hi = std::min((psi_f + a) / (1.0 + b / 2.0), 1.0);
        if (pos_lo <= pos_hi)
        {
            if (!out.empty() && out.back().hi >= pos_lo)
                out.back().hi = pos_hi;
            else
                out.push_back({pos_lo, pos_hi});
        }
        return out;
    }

    /// Width of the squint-free coverage for threshold `c_t`; identical for every focus.
    inline double beamwidth_nbs(double c_t, const BandConfig &band, const ArrayConfig &arr)
    {
        return 2.0 * main_lobe_half_width(equivalent_gain_ratio(c_t, band, arr), arr);
    }

} // namespace beamsquint

#endif
