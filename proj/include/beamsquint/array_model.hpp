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


#ifndef BEAMSQUINT_ARRAY_MODEL_HPP
#define BEAMSQUINT_ARRAY_MODEL_HPP

#include "errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace beamsquint
{
    /// Uniform linear array of isotropic elements at half-wavelength spacing.
    class ArrayConfig
    {
    public:
        explicit ArrayConfig(int n_antennas, double spacing_ratio = 0.5)
            : n_antennas_(n_antennas), spacing_ratio_(spacing_ratio)
        {
            if (n_antennas < 2)
                throw ConfigError("antenna count must be at least 2, got " + std::to_string(n_antennas));
            // The closed-form gain below only holds for d = lambda_c / 2.
            if (spacing_ratio != 0.5)
                throw ConfigError("only half-wavelength spacing (0.5) is supported");
        }

        int n_antennas() const noexcept { return n_antennas_; }
        double spacing_ratio() const noexcept { return spacing_ratio_; }

        /// Peak array gain sqrt(N), reached at zero pointing error.
        double max_gain() const noexcept { return std::sqrt(static_cast<double>(n_antennas_)); }

    private:
        int n_antennas_;
        double spacing_ratio_;
    };

    /// Subcarrier frequencies of an OFDM band normalised to the carrier.
    class SubcarrierGrid
    {
    public:
        SubcarrierGrid(double fractional_bandwidth, int n_subcarriers)
            : b_(fractional_bandwidth)
        {
            if (!(fractional_bandwidth >= 0.0 && fractional_bandwidth < 2.0))
                throw ConfigError("fractional bandwidth must lie in [0, 2)");
            if (n_subcarriers < 2 || n_subcarriers % 2 != 0)
                throw ConfigError("subcarrier count must be even and at least 2, got " +
                                  std::to_string(n_subcarriers));

            ratios_.resize(static_cast<std::size_t>(n_subcarriers));
            const double nf = n_subcarriers;
            for (int n = 0; n < n_subcarriers; ++n)
                ratios_[static_cast<std::size_t>(n)] = 1.0 + (2.0 * n - nf + 1.0) * b_ / (2.0 * nf);
        }

        std::span<const double> ratios() const noexcept { return ratios_; }
        double fractional_bandwidth() const noexcept { return b_; }
        std::size_t size() const noexcept { return ratios_.size(); }
        double operator[](std::size_t i) const { return ratios_[i]; }

        /// True when every subcarrier sits on the carrier (b = 0).
        bool collapsed() const noexcept { return b_ == 0.0; }

    private:
        double b_;
        std::vector<double> ratios_;
    };

    struct PhaseVector
    {
        std::vector<double> phases; // radians, element 0 is the reference
        double focus = 0.0;
    };

    /// psi = sin(theta) for a physical angle theta in [-pi/2, pi/2].
    inline double virtual_angle(double theta)
    {
        constexpr double half_pi = std::numbers::pi / 2.0;
        if (!(theta >= -half_pi && theta <= half_pi))
            throw DomainError("physical angle must lie in [-pi/2, pi/2]");
        return std::sin(theta);
    }

    /// Phase shifts steering the array to virtual angle `psi_f` at the carrier frequency.
    inline PhaseVector phase_vector(double psi_f, const ArrayConfig &cfg)
    {
        if (!(psi_f >= -1.0 && psi_f <= 1.0))
            throw DomainError("focus angle must lie in [-1, 1]");

        PhaseVector out;
        out.focus = psi_f;
        out.phases.resize(static_cast<std::size_t>(cfg.n_antennas()));
        const double step = 2.0 * std::numbers::pi * cfg.spacing_ratio() * psi_f;
        for (std::size_t n = 0; n < out.phases.size(); ++n)
            out.phases[n] = step * static_cast<double>(n);
        return out;
    }

    namespace detail
    {
        // Below this |sin(pi x / 2)| the ratio is replaced by its analytic limit.
        inline constexpr double kSingularityThreshold = 1e-9;

        // Real amplitude sin(N pi x / 2) / (sqrt(N) sin(pi x / 2)), sign included.
        inline double gain_amplitude(double x, int n)
        {
            const double half_pi = std::numbers::pi / 2.0;
            const double den = std::sin(half_pi * x);
            const double root_n = std::sqrt(static_cast<double>(n));
            if (std::abs(den) < kSingularityThreshold)
            {
                // x is within rounding of an even integer 2k: limit is sqrt(N) (-1)^{k (N-1)}.
                const long long k = std::llround(x / 2.0);
                const bool negative = ((k % 2 != 0) && (n % 2 == 0));
                return negative ? -root_n : root_n;
            }
            return std::sin(half_pi * n * x) / (root_n * den);
        }

        // |g(x)|^2 without the square root, used in every capacity term.
        inline double gain_power(double x, int n)
        {
            const double a = gain_amplitude(x, n);
            return a * a;
        }
    } // namespace detail

    /// Complex array gain g(x) at pointing error x = xi * psi - psi_f.
    inline std::complex<double> gain(double x, const ArrayConfig &cfg)
    {
        const int n = cfg.n_antennas();
        const double phase = (n - 1) * std::numbers::pi * x / 2.0;
        return detail::gain_amplitude(x, n) * std::polar(1.0, phase);
    }

    inline double gain_mag(double x, const ArrayConfig &cfg)
    {
        return std::abs(detail::gain_amplitude(x, cfg.n_antennas()));
    }

    inline SubcarrierGrid subcarrier_grid(double b, int n_f)
    {
        return SubcarrierGrid(b, n_f);
    }

} // namespace beamsquint

#endif
