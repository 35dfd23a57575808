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


#ifndef BEAMSQUINT_CODEBOOK_HPP
#define BEAMSQUINT_CODEBOOK_HPP

#include "array_model.hpp"
#include "bisection.hpp"
#include "capacity.hpp"
#include "errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beamsquint
{
    enum class Parity
    {
        odd,
        even
    };

    inline std::string_view to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

    inline Parity parse_parity(std::string_view s)
    {
        if (s == "odd")
            return Parity::odd;
        if (s == "even")
            return Parity::even;
        throw ConfigError("parity must be \"odd\" or \"even\"");
    }

    /// One fine beam and the angular interval on which it meets the capacity threshold.
    struct Beam
    {
        double focus = 0.0;
        PhaseVector phases;
        double left = 0.0;
        double right = 0.0;

        double width() const noexcept { return right - left; }
    };

    /// Beams ordered by focus whose coverages abut and jointly span [-psi_m, psi_m].
    ///
    /// The outermost foci may lie slightly beyond psi_m: the last beam is kept exactly
    /// as the left-edge chain produces it.
    struct Codebook
    {
        int n_antennas = 0;
        double b = 0.0;
        int n_f = 0;
        double snr = 0.0;
        double psi_m = 0.0;
        double c_t = 0.0;
        std::optional<double> r; // set when c_t was derived from a gain ratio
        Parity parity = Parity::odd;
        std::vector<Beam> beams;

        std::size_t size() const noexcept { return beams.size(); }
    };

    struct FeasibilityReport
    {
        int n = 0;
        double b = 0.0;
        bool feasible = false;
        std::optional<double> failing_focus;
        std::optional<std::size_t> size_if_feasible;
    };

    struct DesignOptions
    {
        BisectionOptions bisection{};
        // Guards against chains that crawl towards a point where coverage vanishes.
        std::size_t max_beams = 200000;
    };

    namespace detail
    {
        // Steering phases for any focus. Foci past |psi| = 1 are realisable (phases wrap)
        // and occur for the outermost beams of a codebook.
        inline PhaseVector steering_phases(double focus, int n)
        {
            PhaseVector out;
            out.focus = focus;
            out.phases.resize(static_cast<std::size_t>(n));
            for (std::size_t k = 0; k < out.phases.size(); ++k)
                out.phases[k] = std::numbers::pi * focus * static_cast<double>(k) + 0.0; // no -0.0 for mirrored beams
            return out;
        }

        class EdgeSolver
        {
        public:
            EdgeSolver(double c_t, const BandConfig &band, const ArrayConfig &arr, BisectionOptions options = {})
                : band_(band), n_(arr.n_antennas()), c_t_(c_t),
                  half_beamwidth_(0.5 * beamwidth_nbs(c_t, band, arr)), options_(options)
            {
            }

            double half_beamwidth() const noexcept { return half_beamwidth_; }

            bool meets(double focus, double psi) const
            {
                return capacity_bs(focus, psi, band_, n_) >= c_t_;
            }

            void require_peak(double focus) const
            {
                if (!meets(focus, focus))
                    throw InfeasibleError("no codebook exists: capacity at the beam focus is below the threshold",
                                          focus);
            }

            double right_edge(double focus) const
            {
                require_peak(focus);
                return bisect_boundary([&](double psi) { return meets(focus, psi); },
                                       focus, focus + half_beamwidth_, options_);
            }

            double left_edge(double focus) const
            {
                require_peak(focus);
                return bisect_boundary([&](double psi) { return meets(focus, psi); },
                                       focus, focus - half_beamwidth_, options_);
            }

            // Capacity at the fixed angle `left` falls as the focus moves right of it.
            double focus_from_left(double left) const
            {
                if (!meets(left, left))
                    throw InfeasibleError("no codebook exists: no focus reaches the threshold at the left edge",
                                          left);
                return bisect_boundary([&](double focus) { return meets(focus, left); },
                                       left, left + half_beamwidth_, options_);
            }

        private:
            const BandConfig &band_;
            int n_;
            double c_t_;
            double half_beamwidth_;
            BisectionOptions options_;
        };
    } // namespace detail

    /// Right coverage edge of a beam focused at `psi_f`.
    inline double solve_right_edge(double psi_f, double c_t, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        return detail::EdgeSolver(c_t, band, arr).right_edge(psi_f);
    }

    inline double solve_left_edge(double psi_f, double c_t, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        return detail::EdgeSolver(c_t, band, arr).left_edge(psi_f);
    }

    /// Focus whose left coverage edge is exactly `psi_l`.
    inline double solve_focus_from_left(double psi_l, double c_t, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_l, "left edge");
        return detail::EdgeSolver(c_t, band, arr).focus_from_left(psi_l);
    }

    /// Builds the odd- or even-size codebook by chaining left edges outward from broadside.
    inline Codebook design_codebook(Parity parity, double psi_m, double c_t, const BandConfig &band,
                                    const ArrayConfig &arr, const DesignOptions &options = {})
    {
        if (!(psi_m > 0.0 && psi_m <= 1.0))
            throw DomainError("coverage half-range psi_m must lie in (0, 1]");

        const detail::EdgeSolver solver(c_t, band, arr, options.bisection);
        const int n = arr.n_antennas();

        struct Span
        {
            double focus, left, right;
        };
        std::vector<Span> positive;
        std::optional<Span> center;

        std::size_t count = 0;
        double reach = 0.0;
        if (parity == Parity::odd)
        {
            reach = solver.right_edge(0.0);
            center = Span{0.0, -reach, reach};
            count = 1;
        }

        const double min_progress = 2.0 * options.bisection.tolerance;
        while (reach < psi_m)
        {
            const double left = reach;
            const double focus = solver.focus_from_left(left);
            const double right = solver.right_edge(focus);
            if (right - left <= min_progress)
                throw InfeasibleError("no codebook exists: beam coverage vanishes", focus);
            positive.push_back({focus, left, right});
            reach = right;
            count += 2;
            if (count > options.max_beams)
                throw InfeasibleError("no codebook exists: beam limit exceeded", focus);
        }

        Codebook cb;
        cb.n_antennas = n;
        cb.b = band.fractional_bandwidth();
        cb.n_f = band.n_subcarriers();
        cb.snr = band.snr();
        cb.psi_m = psi_m;
        cb.c_t = c_t;
        cb.parity = parity;
        cb.beams.reserve(count);

        auto push = [&](double focus, double left, double right)
        { cb.beams.push_back(Beam{focus, detail::steering_phases(focus, n), left, right}); };

        for (auto it = positive.rbegin(); it != positive.rend(); ++it)
            push(-it->focus, -it->right, -it->left);
        if (center)
            push(center->focus, center->left, center->right);
        for (const Span &s : positive)
            push(s.focus, s.left, s.right);

        if (cb.beams.size() != count)
            throw Error("internal error: beam count does not match the beam counter");
        return cb;
    }

    /// Smaller of the odd and even codebooks; ties go to the odd one.
    inline Codebook design_codebook(double psi_m, double c_t, const BandConfig &band, const ArrayConfig &arr,
                                    const DesignOptions &options = {})
    {
        std::optional<Codebook> odd, even;
        std::optional<InfeasibleError> odd_failure;
        try
        {
            odd = design_codebook(Parity::odd, psi_m, c_t, band, arr, options);
        }
        catch (const InfeasibleError &e)
        {
            odd_failure = e;
        }
        try
        {
            even = design_codebook(Parity::even, psi_m, c_t, band, arr, options);
        }
        catch (const InfeasibleError &e)
        {
            if (odd_failure)
                throw *odd_failure;
        }

        if (odd && even)
            return even->size() < odd->size() ? std::move(*even) : std::move(*odd);
        return odd ? std::move(*odd) : std::move(*even);
    }

    /// Design with the threshold C_t(r); the ratio is recorded in the codebook.
    inline Codebook design_codebook_for_ratio(double psi_m, double r, const BandConfig &band,
                                              const ArrayConfig &arr, const DesignOptions &options = {})
    {
        Codebook cb = design_codebook(psi_m, capacity_threshold(r, band, arr), band, arr, options);
        cb.r = r;
        return cb;
    }

    /// Independent coverage test: every grid point of [-psi_m, psi_m] must reach
    /// c_t (less a relative tolerance) under at least one beam of the codebook.
    /// Beam edges are not consulted.
    inline bool coverage_check(const Codebook &cb, const BandConfig &band, const ArrayConfig &arr,
                               double grid_step, double rel_tol = 1e-9)
    {
        if (!(grid_step > 0.0))
            throw DomainError("grid step must be positive");
        if (cb.beams.empty())
            return false;

        const int n = arr.n_antennas();
        const double floor = cb.c_t - rel_tol * std::abs(cb.c_t);
        std::vector<double> foci;
        foci.reserve(cb.beams.size());
        for (const Beam &beam : cb.beams)
            foci.push_back(beam.focus);

        const auto points = static_cast<std::size_t>(std::ceil(2.0 * cb.psi_m / grid_step)) + 1;
        std::atomic<bool> covered{true};

        parallel_for(points, [&](std::size_t i)
                     {
            if (!covered.load(std::memory_order_relaxed))
                return;
            const double psi = std::min(-cb.psi_m + static_cast<double>(i) * grid_step, cb.psi_m);

            // Try beams by increasing focus distance; the nearest one almost always covers.
            const auto pivot = std::lower_bound(foci.begin(), foci.end(), psi) - foci.begin();
            std::ptrdiff_t lo = pivot - 1, hi = pivot;
            const auto size = static_cast<std::ptrdiff_t>(foci.size());
            while (lo >= 0 || hi < size)
            {
                std::ptrdiff_t pick;
                if (lo < 0)
                    pick = hi++;
                else if (hi >= size)
                    pick = lo--;
                else if (psi - foci[lo] <= foci[hi] - psi)
                    pick = lo--;
                else
                    pick = hi++;
                if (detail::capacity_bs(foci[pick], psi, band, n) >= floor)
                    return;
            }
            covered.store(false, std::memory_order_relaxed); });

        return covered.load();
    }

    /// Worst capacity over a squint-unaware beam that covers the gain region R_0(psi_f, r).
    ///
    /// Both region edges are evaluated at psi_f -/+ the main-lobe half-width; near endfire
    /// the outer edge lies past |psi| = 1 and is still evaluated with the same formula.
    inline double traditional_min_capacity(double psi_f, double r, const BandConfig &band, const ArrayConfig &arr)
    {
        detail::require_angle(psi_f, "focus angle");
        const double w = main_lobe_half_width(r, arr);
        const int n = arr.n_antennas();
        return std::min(detail::capacity_bs(psi_f, psi_f - w, band, n),
                        detail::capacity_bs(psi_f, psi_f + w, band, n));
    }

    /// Relative capacity gain of a squint-compensating design over the squint-unaware beam.
    inline double improvement_ratio(double psi_f, double r, const BandConfig &band, const ArrayConfig &arr)
    {
        const double worst = traditional_min_capacity(psi_f, r, band, arr);
        if (!(worst > 0.0))
            throw DegenerateInputError("minimum capacity of the traditional beam is zero");
        return (capacity_threshold(r, band, arr) - worst) / worst;
    }

    struct ImprovementMax
    {
        double ratio = 0.0;
        double focus = 0.0;
    };

    /// Maximum improvement ratio over focus angles. The endfire focus is evaluated
    /// first and a coarse grid over [-1, 1] is scanned; a grid point only wins if it
    /// is strictly larger.
    inline ImprovementMax improvement_max(double r, const BandConfig &band, const ArrayConfig &arr,
                                          double grid_step = 0.05)
    {
        ImprovementMax best{improvement_ratio(1.0, r, band, arr), 1.0};
        const auto steps = static_cast<int>(std::llround(2.0 / grid_step));
        for (int i = 0; i <= steps; ++i)
        {
            const double focus = std::clamp(-1.0 + i * grid_step, -1.0, 1.0);
            const double ratio = improvement_ratio(focus, r, band, arr);
            if (ratio > best.ratio)
                best = {ratio, focus};
        }
        return best;
    }

    inline FeasibilityReport check_feasibility(double psi_m, double r, const BandConfig &band,
                                               const ArrayConfig &arr, const DesignOptions &options = {})
    {
        FeasibilityReport report;
        report.n = arr.n_antennas();
        report.b = band.fractional_bandwidth();
        try
        {
            const Codebook cb = design_codebook_for_ratio(psi_m, r, band, arr, options);
            report.feasible = true;
            report.size_if_feasible = cb.size();
        }
        catch (const InfeasibleError &e)
        {
            report.failing_focus = e.position();
        }
        return report;
    }

    struct BsupEstimate
    {
        double b_sup = 0.0;    // largest b found feasible
        double infeasible = 2.0; // smallest b found infeasible (2 if never probed)
        int iterations = 0;
    };

    struct BsupOptions
    {
        double tol_b = 1e-6;
        int max_iterations = 60;
    };

    /// Bracket the largest fractional bandwidth for which a codebook exists.
    inline BsupEstimate estimate_bsup(const ArrayConfig &arr, double r, double snr, int n_f, double psi_m,
                                      const BsupOptions &options = {})
    {
        if (!(options.tol_b > 0.0))
            throw DomainError("tol_b must be positive");
        const BandConfig base = BandConfig::fractional(0.0, n_f, snr);

        BsupEstimate est;
        double lo = 0.0, hi = 2.0;
        while (est.iterations < options.max_iterations && hi - lo > options.tol_b)
        {
            const double mid = 0.5 * (lo + hi);
            ++est.iterations;
            if (check_feasibility(psi_m, r, base.with_fractional_bandwidth(mid), arr).feasible)
                lo = mid;
            else
                hi = mid;
        }
        est.b_sup = lo;
        est.infeasible = hi;
        return est;
    }

    struct BsupSample
    {
        int n = 0;
        double b_sup = 0.0;
    };

    struct BsupFit
    {
        double a = 0.0;                   // least-squares constant in b_sup = a / N
        double max_deviation = 0.0;       // max |b_sup N - a|
        double max_relative_deviation = 0.0;
        std::vector<BsupSample> samples;
    };

    /// Fits b_sup N to a constant: the least-squares solution is the mean of the products.
    inline BsupFit fit_bsup_constant(std::span<const BsupSample> samples)
    {
        std::vector<int> distinct;
        for (const auto &s : samples)
        {
            if (s.n < 2 || !(s.b_sup > 0.0))
                throw ConfigError("b_sup samples need N >= 2 and positive b_sup");
            if (std::find(distinct.begin(), distinct.end(), s.n) == distinct.end())
                distinct.push_back(s.n);
        }
        if (distinct.size() < 3)
            throw ConfigError("fitting b_sup = a / N needs at least 3 distinct array sizes");

        BsupFit fit;
        fit.samples.assign(samples.begin(), samples.end());
        double sum = 0.0;
        for (const auto &s : samples)
            sum += s.b_sup * s.n;
        fit.a = sum / static_cast<double>(samples.size());
        for (const auto &s : samples)
            fit.max_deviation = std::max(fit.max_deviation, std::abs(s.b_sup * s.n - fit.a));
        fit.max_relative_deviation = fit.max_deviation / fit.a;
        return fit;
    }

    inline BsupFit fit_bsup_constant(std::span<const int> n_values, double r, double snr, int n_f, double psi_m,
                                     const BsupOptions &options = {})
    {
        std::vector<int> distinct(n_values.begin(), n_values.end());
        std::sort(distinct.begin(), distinct.end());
        if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3)
            throw ConfigError("fitting b_sup = a / N needs at least 3 distinct array sizes");

        std::vector<BsupSample> samples(n_values.size());
        parallel_for(n_values.size(), [&](std::size_t i)
                     { samples[i] = {n_values[i],
                                     estimate_bsup(ArrayConfig(n_values[i]), r, snr, n_f, psi_m, options).b_sup}; });
        return fit_bsup_constant(std::span<const BsupSample>(samples));
    }

} // namespace beamsquint

#endif
