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


#ifndef BEAMSQUINT_EXPERIMENTS_HPP
#define BEAMSQUINT_EXPERIMENTS_HPP

#include "array_model.hpp"
#include "capacity.hpp"
#include "codebook.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "sweep_result.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace beamsquint
{
    using Params = nlohmann::ordered_json;

    namespace detail
    {
        template <typename T>
        void read_param(const Params &j, const char *key, T &out)
        {
            if (!j.is_object())
                throw ConfigError("sweep parameters must be a JSON object");
            if (!j.contains(key))
                return;
            try
            {
                out = j.at(key).get<T>();
            }
            catch (const nlohmann::json::exception &)
            {
                throw ConfigError(std::string("parameter \"") + key + "\" has the wrong type");
            }
        }

        inline void require_points(int points, const char *what)
        {
            if (points < 2)
                throw ConfigError(std::string(what) + " needs at least 2 points");
        }

        inline void require_sizes(const std::vector<int> &ns)
        {
            if (ns.empty())
                throw ConfigError("at least one antenna count is required");
        }

        inline std::string n_label(std::string_view quantity, int n)
        {
            return std::string(quantity) + "(N=" + std::to_string(n) + ")";
        }

        // Shortest round-trip decimal, used in column labels.
        inline std::string compact(double v)
        {
            return Params(v).dump();
        }

        // Uniform double in [lo, hi) from the top 53 bits; identical on every platform.
        inline double uniform(std::mt19937_64 &rng, double lo, double hi)
        {
            const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            return lo + (hi - lo) * unit;
        }

        inline int uniform_int(std::mt19937_64 &rng, int lo, int hi)
        {
            const auto span = static_cast<std::uint64_t>(hi - lo + 1);
            return lo + static_cast<int>(rng() % span);
        }
    } // namespace detail

    // ---------------------------------------------------------------------------------
    // Array gain pattern |g(x)|.

    struct GainPatternParams
    {
        int n = 16;
        double x_min = -0.5;
        double x_max = 0.5;
        int steps = 2001;

        Params to_params() const { return {{"n", n}, {"x_min", x_min}, {"x_max", x_max}, {"steps", steps}}; }

        static GainPatternParams from_params(const Params &j)
        {
            GainPatternParams p;
            detail::read_param(j, "n", p.n);
            detail::read_param(j, "x_min", p.x_min);
            detail::read_param(j, "x_max", p.x_max);
            detail::read_param(j, "steps", p.steps);
            return p;
        }
    };

    inline SweepResult sweep_gain_pattern(const GainPatternParams &p)
    {
        detail::require_points(p.steps, "gain pattern");
        if (!(p.x_max > p.x_min))
            throw ConfigError("x_max must exceed x_min");
        const ArrayConfig arr(p.n);

        SweepResult out{"gain_pattern", {{"x", "-"}, {"gain_mag", "-"}}, {}, p.to_params()};
        const double step = (p.x_max - p.x_min) / (p.steps - 1);
        for (int i = 0; i < p.steps; ++i)
        {
            const double x = (i == p.steps - 1) ? p.x_max : p.x_min + i * step;
            out.add_row({x, gain_mag(x, arr)});
        }
        return out;
    }

    // ---------------------------------------------------------------------------------
    // Capacity against absolute bandwidth at fixed total received power.

    struct CapacityVsBandwidthParams
    {
        std::vector<int> n_values{16, 64, 256};
        double psi_f = 0.9;
        double psi = 0.9;
        double p_over_sigma2_hz = 2e9;
        double carrier_hz = 73e9;
        int n_f = 2048;
        double bandwidth_min_hz = 1e7;
        double bandwidth_max_hz = 73e9;
        int points = 50;

        Params to_params() const
        {
            return {{"n_values", n_values}, {"psi_f", psi_f}, {"psi", psi},
                    {"p_over_sigma2_hz", p_over_sigma2_hz}, {"carrier_hz", carrier_hz},
                    {"n_f", n_f}, {"bandwidth_min_hz", bandwidth_min_hz},
                    {"bandwidth_max_hz", bandwidth_max_hz}, {"points", points}};
        }

        static CapacityVsBandwidthParams from_params(const Params &j)
        {
            CapacityVsBandwidthParams p;
            detail::read_param(j, "n_values", p.n_values);
            detail::read_param(j, "psi_f", p.psi_f);
            detail::read_param(j, "psi", p.psi);
            detail::read_param(j, "p_over_sigma2_hz", p.p_over_sigma2_hz);
            detail::read_param(j, "carrier_hz", p.carrier_hz);
            detail::read_param(j, "n_f", p.n_f);
            detail::read_param(j, "bandwidth_min_hz", p.bandwidth_min_hz);
            detail::read_param(j, "bandwidth_max_hz", p.bandwidth_max_hz);
            detail::read_param(j, "points", p.points);
            return p;
        }
    };

    /// Log-spaced bandwidths; capacities in bit/s with snr = (P/sigma^2) / B.
    inline SweepResult sweep_capacity_vs_bandwidth(const CapacityVsBandwidthParams &p)
    {
        detail::require_sizes(p.n_values);
        detail::require_points(p.points, "bandwidth sweep");
        if (!(p.bandwidth_min_hz > 0.0 && p.bandwidth_max_hz > p.bandwidth_min_hz))
            throw ConfigError("bandwidth range must be positive and increasing");
        if (!(p.p_over_sigma2_hz > 0.0))
            throw ConfigError("P/sigma^2 must be positive");

        SweepResult out{"capacity_vs_bandwidth", {{"B", "Hz"}}, {}, p.to_params()};
        out.params["capacity_unit_note"] = "bit/s, from P/sigma^2 in Hz";
        for (const int n : p.n_values)
        {
            out.columns.push_back({detail::n_label("C_BS", n), "bit/s"});
            out.columns.push_back({detail::n_label("C_NBS", n), "bit/s"});
        }

        const double log_lo = std::log(p.bandwidth_min_hz);
        const double log_step = (std::log(p.bandwidth_max_hz) - log_lo) / (p.points - 1);
        std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(p.points));
        parallel_for(rows.size(), [&](std::size_t i)
                     {
            const double bw = i == 0               ? p.bandwidth_min_hz
                              : i + 1 == rows.size() ? p.bandwidth_max_hz
                                                     : std::exp(log_lo + static_cast<double>(i) * log_step);
            const BandConfig band = BandConfig::absolute(bw, p.carrier_hz, p.n_f, p.p_over_sigma2_hz / bw);
            std::vector<Cell> row{bw};
            for (const int n : p.n_values)
            {
                const ArrayConfig arr(n);
                row.emplace_back(capacity_bs(p.psi_f, p.psi, band, arr));
                row.emplace_back(capacity_nbs(p.psi_f, p.psi, band, arr));
            }
            rows[i] = std::move(row); });
        for (auto &row : rows)
            out.add_row(std::move(row));
        return out;
    }

    // ---------------------------------------------------------------------------------
    // Improvement ratio against focus angle.

    struct ImprovementVsFocusParams
    {
        std::vector<int> n_values{16, 32, 64, 128};
        double b = 0.0342;
        double r = kHalfPowerRatio;
        double snr = 1.0;
        int n_f = 2048;
        double psi_step = 0.01;

        Params to_params() const
        {
            return {{"n_values", n_values}, {"b", b}, {"r", r}, {"snr", snr}, {"n_f", n_f}, {"psi_step", psi_step}};
        }

        static ImprovementVsFocusParams from_params(const Params &j)
        {
            ImprovementVsFocusParams p;
            detail::read_param(j, "n_values", p.n_values);
            detail::read_param(j, "b", p.b);
            detail::read_param(j, "r", p.r);
            detail::read_param(j, "snr", p.snr);
            detail::read_param(j, "n_f", p.n_f);
            detail::read_param(j, "psi_step", p.psi_step);
            return p;
        }
    };

    /// Focus angles 0, step, ..., 1 (the last point is exactly 1).
    inline SweepResult sweep_improvement_vs_focus(const ImprovementVsFocusParams &p)
    {
        detail::require_sizes(p.n_values);
        if (!(p.psi_step > 0.0 && p.psi_step <= 1.0))
            throw ConfigError("psi_step must lie in (0, 1]");
        const BandConfig band = BandConfig::fractional(p.b, p.n_f, p.snr);

        SweepResult out{"improvement_vs_focus", {{"psi_f", "-"}}, {}, p.to_params()};
        for (const int n : p.n_values)
            out.columns.push_back({detail::n_label("I", n), "-"});

        const auto points = static_cast<std::size_t>(std::ceil(1.0 / p.psi_step - 1e-9)) + 1;
        std::vector<std::vector<Cell>> rows(points);
        parallel_for(points, [&](std::size_t i)
                     {
            const double focus = std::min(static_cast<double>(i) * p.psi_step, 1.0);
            std::vector<Cell> row{focus};
            for (const int n : p.n_values)
                row.emplace_back(improvement_ratio(focus, p.r, band, ArrayConfig(n)));
            rows[i] = std::move(row); });
        for (auto &row : rows)
            out.add_row(std::move(row));
        return out;
    }

    // ---------------------------------------------------------------------------------
    // Maximum improvement ratio against fractional bandwidth.

    struct ImprovementMaxVsBParams
    {
        std::vector<int> n_values{16, 32, 64, 128};
        double b_min = 0.0;
        double b_max = 0.1;
        int points = 51;
        double r = kHalfPowerRatio;
        double snr = 1.0;
        int n_f = 2048;

        Params to_params() const
        {
            return {{"n_values", n_values}, {"b_min", b_min}, {"b_max", b_max}, {"points", points},
                    {"r", r}, {"snr", snr}, {"n_f", n_f}};
        }

        static ImprovementMaxVsBParams from_params(const Params &j)
        {
            ImprovementMaxVsBParams p;
            detail::read_param(j, "n_values", p.n_values);
            detail::read_param(j, "b_min", p.b_min);
            detail::read_param(j, "b_max", p.b_max);
            detail::read_param(j, "points", p.points);
            detail::read_param(j, "r", p.r);
            detail::read_param(j, "snr", p.snr);
            detail::read_param(j, "n_f", p.n_f);
            return p;
        }
    };

    inline SweepResult sweep_improvement_max_vs_b(const ImprovementMaxVsBParams &p)
    {
        detail::require_sizes(p.n_values);
        detail::require_points(p.points, "bandwidth sweep");
        if (!(p.b_min >= 0.0 && p.b_max > p.b_min && p.b_max < 2.0))
            throw ConfigError("fractional bandwidth range must satisfy 0 <= b_min < b_max < 2");

        SweepResult out{"improvement_max_vs_b", {{"b", "-"}}, {}, p.to_params()};
        for (const int n : p.n_values)
            out.columns.push_back({detail::n_label("I_max", n), "-"});

        const double step = (p.b_max - p.b_min) / (p.points - 1);
        std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(p.points));
        parallel_for(rows.size(), [&](std::size_t i)
                     {
            const double b = (i + 1 == rows.size()) ? p.b_max : p.b_min + static_cast<double>(i) * step;
            const BandConfig band = BandConfig::fractional(b, p.n_f, p.snr);
            std::vector<Cell> row{b};
            for (const int n : p.n_values)
                row.emplace_back(improvement_max(p.r, band, ArrayConfig(n)).ratio);
            rows[i] = std::move(row); });
        for (auto &row : rows)
            out.add_row(std::move(row));
        return out;
    }

    // ---------------------------------------------------------------------------------
    // Minimum codebook size against array size.

    struct CodebookSizeParams
    {
        std::vector<double> b_values{0.0179, 0.0342, 0.0417, 0.0714};
        int n_min = 8;
        int n_max = 128;
        int n_step = 4;
        double r = kHalfPowerRatio;
        double snr = 1.0;
        double psi_m = 1.0;
        int n_f = 2048;

        Params to_params() const
        {
            return {{"b_values", b_values}, {"n_min", n_min}, {"n_max", n_max}, {"n_step", n_step},
                    {"r", r}, {"snr", snr}, {"psi_m", psi_m}, {"n_f", n_f}};
        }

        static CodebookSizeParams from_params(const Params &j)
        {
            CodebookSizeParams p;
            detail::read_param(j, "b_values", p.b_values);
            detail::read_param(j, "n_min", p.n_min);
            detail::read_param(j, "n_max", p.n_max);
            detail::read_param(j, "n_step", p.n_step);
            detail::read_param(j, "r", p.r);
            detail::read_param(j, "snr", p.snr);
            detail::read_param(j, "psi_m", p.psi_m);
            detail::read_param(j, "n_f", p.n_f);
            return p;
        }
    };

    /// Cells are empty where no codebook exists.
    inline SweepResult sweep_codebook_size_vs_n(const CodebookSizeParams &p)
    {
        if (p.b_values.empty())
            throw ConfigError("at least one fractional bandwidth is required");
        if (p.n_min < 2 || p.n_max < p.n_min || p.n_step < 1)
            throw ConfigError("antenna range must satisfy 2 <= n_min <= n_max with n_step >= 1");

        SweepResult out{"codebook_size_vs_n", {{"N", "-"}}, {}, p.to_params()};
        for (const double b : p.b_values)
            out.columns.push_back({"M(b=" + detail::compact(b) + ")", "-"});

        std::vector<int> ns;
        for (int n = p.n_min; n <= p.n_max; n += p.n_step)
            ns.push_back(n);
        const std::size_t width = p.b_values.size();
        std::vector<Cell> cells(ns.size() * width);
        parallel_for(cells.size(), [&](std::size_t k)
                     {
            const ArrayConfig arr(ns[k / width]);
            const BandConfig band = BandConfig::fractional(p.b_values[k % width], p.n_f, p.snr);
            const FeasibilityReport rep = check_feasibility(p.psi_m, p.r, band, arr);
            if (rep.size_if_feasible)
                cells[k] = static_cast<double>(*rep.size_if_feasible); });

        for (std::size_t i = 0; i < ns.size(); ++i)
        {
            std::vector<Cell> row{static_cast<double>(ns[i])};
            row.insert(row.end(), cells.begin() + static_cast<std::ptrdiff_t>(i * width),
                       cells.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
            out.add_row(std::move(row));
        }
        return out;
    }

    // ---------------------------------------------------------------------------------
    // Randomised checks of the capacity inequalities and the b_sup scaling law.

    struct VerifyParams
    {
        int samples = 10000;
        std::uint64_t seed = 20170521;
        int n_min = 4;
        int n_max = 128;
        double b_max = 0.1;
        double snr = 1.0;
        int n_f = 2048;
        double capacity_rel_tol = 1e-9;   // capacity with vs without squint
        double efficiency_abs_tol = 1e-12; // spectral efficiency ordering in b
        bool bsup_scaling = false;
        std::vector<int> bsup_n_values{16, 32, 64};
        double r = kHalfPowerRatio;
        double psi_m = 1.0;
        double bsup_constant_lo = 2.94;
        double bsup_constant_hi = 3.14;

        Params to_params() const
        {
            return {{"samples", samples}, {"seed", seed}, {"n_min", n_min}, {"n_max", n_max},
                    {"b_max", b_max}, {"snr", snr}, {"n_f", n_f},
                    {"capacity_rel_tol", capacity_rel_tol}, {"efficiency_abs_tol", efficiency_abs_tol},
                    {"bsup_scaling", bsup_scaling}, {"bsup_n_values", bsup_n_values}, {"r", r},
                    {"psi_m", psi_m}, {"bsup_constant_lo", bsup_constant_lo},
                    {"bsup_constant_hi", bsup_constant_hi}};
        }

        static VerifyParams from_params(const Params &j)
        {
            VerifyParams p;
            detail::read_param(j, "samples", p.samples);
            detail::read_param(j, "seed", p.seed);
            detail::read_param(j, "n_min", p.n_min);
            detail::read_param(j, "n_max", p.n_max);
            detail::read_param(j, "b_max", p.b_max);
            detail::read_param(j, "snr", p.snr);
            detail::read_param(j, "n_f", p.n_f);
            detail::read_param(j, "capacity_rel_tol", p.capacity_rel_tol);
            detail::read_param(j, "efficiency_abs_tol", p.efficiency_abs_tol);
            detail::read_param(j, "bsup_scaling", p.bsup_scaling);
            detail::read_param(j, "bsup_n_values", p.bsup_n_values);
            detail::read_param(j, "r", p.r);
            detail::read_param(j, "psi_m", p.psi_m);
            detail::read_param(j, "bsup_constant_lo", p.bsup_constant_lo);
            detail::read_param(j, "bsup_constant_hi", p.bsup_constant_hi);
            return p;
        }
    };

    /// One random test point: array size, two bandwidths b1 < b2, focus and angle.
    struct FactSample
    {
        int n = 0;
        double b1 = 0.0;
        double b2 = 0.0;
        double psi_f = 0.0;
        double psi = 0.0;
    };

    /// Draws samples with psi inside the concave squint range for b2.
    inline std::vector<FactSample> draw_fact_samples(const VerifyParams &p, std::mt19937_64 &rng)
    {
        std::vector<FactSample> out(static_cast<std::size_t>(p.samples));
        for (auto &s : out)
        {
            s.n = detail::uniform_int(rng, p.n_min, p.n_max);
            s.b1 = detail::uniform(rng, 0.0, p.b_max);
            s.b2 = detail::uniform(rng, 0.0, p.b_max);
            if (s.b1 > s.b2)
                std::swap(s.b1, s.b2);
            const ArrayConfig arr(s.n);
            std::vector<AngleInterval> range;
            do
            {
                s.psi_f = detail::uniform(rng, -1.0, 1.0);
                range = concave_squint_range(s.psi_f, s.b2, arr);
            } while (range.empty());
            const AngleInterval &pick =
                range[range.size() == 1 ? 0 : static_cast<std::size_t>(rng() % range.size())];
            s.psi = detail::uniform(rng, pick.lo, pick.hi);
        }
        return out;
    }

    inline SweepResult verify_facts(const VerifyParams &p)
    {
        if (p.samples < 1)
            throw ConfigError("sample count must be positive");
        if (p.n_min < 2 || p.n_max < p.n_min)
            throw ConfigError("antenna range must satisfy 2 <= n_min <= n_max");
        if (!(p.b_max > 0.0 && p.b_max < 2.0))
            throw ConfigError("b_max must lie in (0, 2)");

        SweepResult out{"verify_facts",
                        {{"check", "-"},
                         {"samples", "-"},
                         {"violations", "-"},
                         {"statistic", "-"},
                         {"witness_n", "-"},
                         {"witness_b1", "-"},
                         {"witness_b2", "-"},
                         {"witness_psi_f", "-"},
                         {"witness_psi", "-"}},
                        {},
                        p.to_params()};

        std::mt19937_64 rng(p.seed);
        const std::vector<FactSample> samples = draw_fact_samples(p, rng);

        // Per sample: relative excess of C_BS over C_NBS at psi (b2), relative gap at
        // psi = 0, and E_BS(b2) - E_BS(b1).
        struct Outcome
        {
            double capacity_excess, broadside_gap, efficiency_excess;
        };
        std::vector<Outcome> outcomes(samples.size());
        parallel_for(samples.size(), [&](std::size_t i)
                     {
            const FactSample &s = samples[i];
            const ArrayConfig arr(s.n);
            const BandConfig band1 = BandConfig::fractional(s.b1, p.n_f, p.snr);
            const BandConfig band2 = BandConfig::fractional(s.b2, p.n_f, p.snr);
            const double nbs = capacity_nbs(s.psi_f, s.psi, band2, arr);
            const double bs = capacity_bs(s.psi_f, s.psi, band2, arr);
            const double nbs0 = capacity_nbs(s.psi_f, 0.0, band2, arr);
            const double bs0 = capacity_bs(s.psi_f, 0.0, band2, arr);
            outcomes[i] = {(bs - nbs) / nbs, std::abs(bs0 - nbs0) / nbs0,
                           spectral_efficiency_bs(s.psi_f, s.psi, band2, arr) -
                               spectral_efficiency_bs(s.psi_f, s.psi, band1, arr)}; });

        auto witness_row = [&](double fact, std::size_t violations, double statistic, const FactSample &w)
        {
            out.add_row({fact, static_cast<double>(samples.size()), static_cast<double>(violations), statistic,
                         static_cast<double>(w.n), w.b1, w.b2, w.psi_f, w.psi});
        };

        {
            std::size_t violations = 0, worst = 0;
            for (std::size_t i = 0; i < outcomes.size(); ++i)
            {
                const bool bad = outcomes[i].capacity_excess > p.capacity_rel_tol ||
                                 !(outcomes[i].broadside_gap < p.capacity_rel_tol);
                violations += bad ? 1 : 0;
                if (outcomes[i].capacity_excess > outcomes[worst].capacity_excess)
                    worst = i;
            }
            witness_row(1.0, violations, outcomes[worst].capacity_excess, samples[worst]);
        }
        {
            std::size_t violations = 0, worst = 0;
            for (std::size_t i = 0; i < outcomes.size(); ++i)
            {
                violations += outcomes[i].efficiency_excess > p.efficiency_abs_tol ? 1 : 0;
                if (outcomes[i].efficiency_excess > outcomes[worst].efficiency_excess)
                    worst = i;
            }
            witness_row(2.0, violations, outcomes[worst].efficiency_excess, samples[worst]);
        }

        if (p.bsup_scaling)
        {
            const BsupFit fit = fit_bsup_constant(p.bsup_n_values, p.r, p.snr, p.n_f, p.psi_m);
            std::size_t violations = 0;
            BsupSample worst = fit.samples.front();
            for (const auto &s : fit.samples)
            {
                const double scaled = s.b_sup * s.n;
                if (scaled < p.bsup_constant_lo || scaled > p.bsup_constant_hi)
                    ++violations;
                if (std::abs(scaled - fit.a) >= std::abs(worst.b_sup * worst.n - fit.a))
                    worst = s;
            }
            out.add_row({3.0, static_cast<double>(fit.samples.size()), static_cast<double>(violations), fit.a,
                         static_cast<double>(worst.n), worst.b_sup, std::nullopt, std::nullopt, std::nullopt});
        }
        return out;
    }

    /// Regenerates a sweep from the name and params stored in a SweepResult.
    inline SweepResult run_sweep(std::string_view name, const Params &params)
    {
        if (name == "gain_pattern")
            return sweep_gain_pattern(GainPatternParams::from_params(params));
        if (name == "capacity_vs_bandwidth")
            return sweep_capacity_vs_bandwidth(CapacityVsBandwidthParams::from_params(params));
        if (name == "improvement_vs_focus")
            return sweep_improvement_vs_focus(ImprovementVsFocusParams::from_params(params));
        if (name == "improvement_max_vs_b")
            return sweep_improvement_max_vs_b(ImprovementMaxVsBParams::from_params(params));
        if (name == "codebook_size_vs_n")
            return sweep_codebook_size_vs_n(CodebookSizeParams::from_params(params));
        if (name == "verify_facts")
            return verify_facts(VerifyParams::from_params(params));
        throw ConfigError("unknown sweep \"" + std::string(name) + "\"");
    }

} // namespace beamsquint

#endif
