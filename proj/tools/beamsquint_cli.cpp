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


// Command-line front end: gain patterns, capacities, codebook design, b_sup
// estimation, parameter sweeps and the randomised checks, emitted as CSV or JSON.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 no codebook exists.

#include <beamsquint/beamsquint.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bs = beamsquint;

namespace
{
    constexpr int kExitConfig = 2;
    constexpr int kExitInfeasible = 3;

    struct BandFlags
    {
        std::optional<double> frac_bandwidth;
        std::optional<double> bandwidth_hz;
        std::optional<double> carrier_hz;
        int subcarriers = 2048;
        std::optional<double> snr_db;
    };

    struct OutputFlags
    {
        std::string format = "csv";
        std::string out;
    };

    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    void add_band_flags(CLI::App *cmd, BandFlags &f, bool snr_required)
    {
        auto *frac = cmd->add_option("--frac-bandwidth", f.frac_bandwidth, "Fractional bandwidth b = B / f_c")
                         ->check(CLI::Range(0.0, 2.0));
        auto *bw = cmd->add_option("--bandwidth-hz", f.bandwidth_hz, "Absolute bandwidth B in Hz")
                       ->check(CLI::PositiveNumber);
        auto *fc = cmd->add_option("--carrier-hz", f.carrier_hz, "Carrier frequency f_c in Hz")
                       ->check(CLI::PositiveNumber);
        bw->needs(fc);
        fc->needs(bw);
        frac->excludes(bw);
        frac->excludes(fc);
        cmd->add_option("--subcarriers", f.subcarriers, "Number of OFDM subcarriers (even)")
            ->capture_default_str()
            ->check(CLI::Range(2, 1 << 24));
        auto *snr = cmd->add_option("--snr-db", f.snr_db, "P / (B sigma^2) in dB");
        if (snr_required)
            snr->required();
    }

    bs::BandConfig make_band(const BandFlags &f)
    {
        if (!f.snr_db)
            throw CLI::ValidationError("--snr-db", "is required");
        const double snr = db_to_linear(*f.snr_db);
        if (f.subcarriers % 2 != 0)
            throw CLI::ValidationError("--subcarriers", "must be even");
        if (f.frac_bandwidth)
        {
            if (*f.frac_bandwidth >= 2.0)
                throw CLI::ValidationError("--frac-bandwidth", "must be below 2");
            return bs::BandConfig::fractional(*f.frac_bandwidth, f.subcarriers, snr);
        }
        if (f.bandwidth_hz && f.carrier_hz)
        {
            if (*f.bandwidth_hz / *f.carrier_hz >= 2.0)
                throw CLI::ValidationError("--bandwidth-hz", "must be below twice --carrier-hz");
            return bs::BandConfig::absolute(*f.bandwidth_hz, *f.carrier_hz, f.subcarriers, snr);
        }
        throw CLI::ValidationError("--frac-bandwidth", "or the --bandwidth-hz/--carrier-hz pair is required");
    }

    void add_output_flags(CLI::App *cmd, OutputFlags &f)
    {
        cmd->add_option("--format", f.format, "Output format")
            ->capture_default_str()
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", f.out, "Output file (default: stdout)");
    }

    void emit(const std::string &text, const OutputFlags &f)
    {
        if (f.out.empty())
        {
            std::cout << text;
            return;
        }
        std::ofstream file(f.out, std::ios::binary);
        if (!file)
            throw bs::ConfigError("cannot open --out file " + f.out);
        file << text;
    }

    void emit(const bs::SweepResult &result, const OutputFlags &f)
    {
        emit(f.format == "json" ? bs::dump(bs::to_json(result)) : bs::to_csv(result), f);
    }

    // Parameters shared by every band-dependent command, recorded in emitted tables.
    bs::Params band_params(const bs::BandConfig &band, int n)
    {
        bs::Params p{{"n", n}, {"b", band.fractional_bandwidth()}, {"n_f", band.n_subcarriers()},
                     {"snr", band.snr()}};
        if (band.bandwidth_hz())
        {
            p["bandwidth_hz"] = *band.bandwidth_hz();
            p["carrier_hz"] = *band.carrier_hz();
        }
        return p;
    }

    std::string capacity_unit(const bs::BandConfig &band)
    {
        return band.bandwidth_hz() ? "bit/s" : "bit/s/Hz";
    }

    bs::Params parse_params_overrides(const std::string &inline_json, const std::string &file)
    {
        bs::Params p = bs::Params::object();
        if (!file.empty())
        {
            std::ifstream in(file);
            if (!in)
                throw bs::ConfigError("cannot read --params-file " + file);
            p = bs::Params::parse(in);
        }
        if (!inline_json.empty())
            p.update(bs::Params::parse(inline_json));
        if (!p.is_object())
            throw bs::ConfigError("sweep parameters must be a JSON object");
        return p;
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Beam squint analysis and capacity-constrained codebook design for uniform linear arrays"};
    app.require_subcommand(1);

    // gain ---------------------------------------------------------------------------
    auto *gain_cmd = app.add_subcommand("gain", "Array gain magnitude |g(x)|");
    int gain_n = 16;
    std::optional<double> gain_x;
    double gain_x_min = -0.5, gain_x_max = 0.5;
    int gain_steps = 2001;
    OutputFlags gain_out;
    gain_cmd->add_option("--antennas", gain_n, "Number of antennas N")->required()->check(CLI::Range(2, 1 << 20));
    gain_cmd->add_option("--x", gain_x, "Single pointing error x");
    gain_cmd->add_option("--x-min", gain_x_min, "Sweep start")->capture_default_str();
    gain_cmd->add_option("--x-max", gain_x_max, "Sweep end")->capture_default_str();
    gain_cmd->add_option("--steps", gain_steps, "Sweep points")->capture_default_str()->check(CLI::Range(2, 1 << 24));
    add_output_flags(gain_cmd, gain_out);

    // capacity -----------------------------------------------------------------------
    auto *cap_cmd = app.add_subcommand("capacity", "Capacity with and without beam squint at one angle");
    int cap_n = 0;
    double cap_psi_f = 0.0, cap_psi = 0.0;
    BandFlags cap_band;
    OutputFlags cap_out;
    cap_cmd->add_option("--antennas", cap_n, "Number of antennas N")->required()->check(CLI::Range(2, 1 << 20));
    cap_cmd->add_option("--psi-f", cap_psi_f, "Beam focus (virtual angle)")->required()->check(CLI::Range(-1.0, 1.0));
    cap_cmd->add_option("--psi", cap_psi, "Angle of arrival (virtual angle)")->required()->check(CLI::Range(-1.0, 1.0));
    add_band_flags(cap_cmd, cap_band, true);
    add_output_flags(cap_cmd, cap_out);

    // design -------------------------------------------------------------------------
    auto *design_cmd = app.add_subcommand("design", "Minimum-size codebook meeting a capacity threshold");
    int design_n = 0;
    std::optional<double> design_r, design_ct;
    double design_psi_m = 1.0;
    BandFlags design_band;
    OutputFlags design_out;
    design_out.format = "json";
    design_cmd->add_option("--antennas", design_n, "Number of antennas N")->required()->check(CLI::Range(2, 1 << 20));
    auto *r_opt = design_cmd->add_option("--r", design_r, "Gain ratio defining C_t(r) (default sqrt(2)/2)")
                      ->check(CLI::Range(0.0, 1.0));
    auto *ct_opt = design_cmd->add_option("--ct", design_ct, "Capacity threshold in output capacity units")
                       ->check(CLI::PositiveNumber);
    r_opt->excludes(ct_opt);
    design_cmd->add_option("--psi-m", design_psi_m, "Coverage half-range")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    add_band_flags(design_cmd, design_band, true);
    add_output_flags(design_cmd, design_out);

    // improvement --------------------------------------------------------------------
    auto *imp_cmd = app.add_subcommand("improvement", "Capacity improvement ratio over a squint-unaware beam");
    int imp_n = 0;
    double imp_r = bs::kHalfPowerRatio;
    std::optional<double> imp_psi_f;
    BandFlags imp_band;
    OutputFlags imp_out;
    imp_cmd->add_option("--antennas", imp_n, "Number of antennas N")->required()->check(CLI::Range(2, 1 << 20));
    imp_cmd->add_option("--r", imp_r, "Gain ratio")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    imp_cmd->add_option("--psi-f", imp_psi_f, "Beam focus; omit for the maximum over all foci")
        ->check(CLI::Range(-1.0, 1.0));
    add_band_flags(imp_cmd, imp_band, true);
    add_output_flags(imp_cmd, imp_out);

    // bsup ---------------------------------------------------------------------------
    auto *bsup_cmd = app.add_subcommand("bsup", "Largest fractional bandwidth admitting a codebook");
    std::vector<int> bsup_n;
    double bsup_r = bs::kHalfPowerRatio, bsup_psi_m = 1.0, bsup_tol = 1e-6;
    double bsup_snr_db = 0.0;
    int bsup_nf = 2048;
    OutputFlags bsup_out;
    bsup_cmd->add_option("--antennas", bsup_n, "Antenna counts (repeatable)")->required()->check(CLI::Range(2, 1 << 20));
    bsup_cmd->add_option("--r", bsup_r, "Gain ratio")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    bsup_cmd->add_option("--snr-db", bsup_snr_db, "P / (B sigma^2) in dB")->required();
    bsup_cmd->add_option("--subcarriers", bsup_nf, "Number of OFDM subcarriers")->capture_default_str()->check(CLI::Range(2, 1 << 24));
    bsup_cmd->add_option("--psi-m", bsup_psi_m, "Coverage half-range")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    bsup_cmd->add_option("--tol-b", bsup_tol, "Bisection tolerance in b")->capture_default_str()->check(CLI::PositiveNumber);
    add_output_flags(bsup_cmd, bsup_out);

    // sweep --------------------------------------------------------------------------
    auto *sweep_cmd = app.add_subcommand("sweep", "Parameter sweeps");
    std::string sweep_kind;
    std::string sweep_params_json, sweep_params_file;
    std::vector<int> sweep_n;
    std::optional<double> sweep_snr_db, sweep_r, sweep_b, sweep_psi_m;
    std::optional<int> sweep_nf;
    OutputFlags sweep_out;
    sweep_cmd->add_option("--kind", sweep_kind, "Sweep to run")
        ->required()
        ->check(CLI::IsMember({"gain-pattern", "capacity-vs-bandwidth", "improvement-vs-focus",
                               "improvement-max-vs-b", "codebook-size-vs-n"}));
    sweep_cmd->add_option("--params", sweep_params_json, "JSON object overriding sweep parameters");
    sweep_cmd->add_option("--params-file", sweep_params_file, "JSON file overriding sweep parameters");
    sweep_cmd->add_option("--antennas", sweep_n, "Antenna counts (repeatable)")->check(CLI::Range(2, 1 << 20));
    sweep_cmd->add_option("--snr-db", sweep_snr_db, "P / (B sigma^2) in dB");
    sweep_cmd->add_option("--subcarriers", sweep_nf, "Number of OFDM subcarriers")->check(CLI::Range(2, 1 << 24));
    sweep_cmd->add_option("--r", sweep_r, "Gain ratio")->check(CLI::Range(0.0, 1.0));
    sweep_cmd->add_option("--frac-bandwidth", sweep_b, "Fractional bandwidth (improvement-vs-focus)")
        ->check(CLI::Range(0.0, 2.0));
    sweep_cmd->add_option("--psi-m", sweep_psi_m, "Coverage half-range (codebook-size-vs-n)")->check(CLI::Range(0.0, 1.0));
    add_output_flags(sweep_cmd, sweep_out);

    // verify -------------------------------------------------------------------------
    auto *verify_cmd = app.add_subcommand("verify", "Randomised checks of the capacity inequalities and b_sup scaling");
    bs::VerifyParams verify_params;
    double verify_snr_db = 0.0;
    OutputFlags verify_out;
    verify_cmd->add_option("--samples", verify_params.samples, "Random samples per check")->capture_default_str()->check(CLI::Range(1, 100000000));
    verify_cmd->add_option("--seed", verify_params.seed, "64-bit seed")->capture_default_str();
    verify_cmd->add_option("--snr-db", verify_snr_db, "P / (B sigma^2) in dB")->capture_default_str();
    verify_cmd->add_option("--subcarriers", verify_params.n_f, "Number of OFDM subcarriers")->capture_default_str()->check(CLI::Range(2, 1 << 24));
    verify_cmd->add_flag("--with-bsup", verify_params.bsup_scaling, "Also estimate b_sup and fit b_sup = a / N");
    add_output_flags(verify_cmd, verify_out);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try
    {
        if (*gain_cmd)
        {
            bs::SweepResult result;
            if (gain_x)
            {
                const bs::ArrayConfig arr(gain_n);
                result = {"gain", {{"x", "-"}, {"gain_mag", "-"}, {"gain_re", "-"}, {"gain_im", "-"}}, {}, {{"n", gain_n}, {"x", *gain_x}}};
                const auto g = bs::gain(*gain_x, arr);
                result.add_row({*gain_x, bs::gain_mag(*gain_x, arr), g.real(), g.imag()});
            }
            else
            {
                result = bs::sweep_gain_pattern({gain_n, gain_x_min, gain_x_max, gain_steps});
            }
            emit(result, gain_out);
        }
        else if (*cap_cmd)
        {
            const bs::BandConfig band = make_band(cap_band);
            const bs::ArrayConfig arr(cap_n);
            bs::Params params = band_params(band, cap_n);
            params["psi_f"] = cap_psi_f;
            params["psi"] = cap_psi;
            const std::string unit = capacity_unit(band);
            bs::SweepResult result{"capacity",
                                   {{"psi_f", "-"}, {"psi", "-"}, {"C_BS", unit}, {"C_NBS", unit}, {"E_BS", "bit/s/Hz"}},
                                   {},
                                   params};
            result.add_row({cap_psi_f, cap_psi, bs::capacity_bs(cap_psi_f, cap_psi, band, arr),
                            bs::capacity_nbs(cap_psi_f, cap_psi, band, arr),
                            bs::spectral_efficiency_bs(cap_psi_f, cap_psi, band, arr)});
            emit(result, cap_out);
        }
        else if (*design_cmd)
        {
            const bs::BandConfig band = make_band(design_band);
            const bs::ArrayConfig arr(design_n);
            const bs::Codebook cb =
                design_ct ? bs::design_codebook(design_psi_m, *design_ct, band, arr)
                          : bs::design_codebook_for_ratio(design_psi_m, design_r.value_or(bs::kHalfPowerRatio), band, arr);
            if (design_out.format == "json")
            {
                emit(bs::dump(bs::to_json(cb)), design_out);
            }
            else
            {
                bs::Params params = band_params(band, design_n);
                params["psi_m"] = cb.psi_m;
                params["c_t"] = cb.c_t;
                params["parity"] = std::string(bs::to_string(cb.parity));
                params["size"] = cb.size();
                bs::SweepResult table{"codebook",
                                      {{"focus", "-"}, {"left", "-"}, {"right", "-"}, {"width", "-"}},
                                      {},
                                      params};
                for (const auto &beam : cb.beams)
                    table.add_row({beam.focus, beam.left, beam.right, beam.width()});
                emit(table, design_out);
            }
        }
        else if (*imp_cmd)
        {
            const bs::BandConfig band = make_band(imp_band);
            const bs::ArrayConfig arr(imp_n);
            bs::Params params = band_params(band, imp_n);
            params["r"] = imp_r;
            bs::SweepResult result{"improvement", {{"psi_f", "-"}, {"C_t", capacity_unit(band)}, {"C_BS_min", capacity_unit(band)}, {"I", "-"}}, {}, params};
            double focus = 0.0, ratio = 0.0;
            if (imp_psi_f)
            {
                focus = *imp_psi_f;
                ratio = bs::improvement_ratio(focus, imp_r, band, arr);
            }
            else
            {
                const auto best = bs::improvement_max(imp_r, band, arr);
                focus = best.focus;
                ratio = best.ratio;
                result.params["maximised_over_focus"] = true;
            }
            result.add_row({focus, bs::capacity_threshold(imp_r, band, arr),
                            bs::traditional_min_capacity(focus, imp_r, band, arr), ratio});
            emit(result, imp_out);
        }
        else if (*bsup_cmd)
        {
            const double snr = db_to_linear(bsup_snr_db);
            if (bsup_nf % 2 != 0)
                throw CLI::ValidationError("--subcarriers", "must be even");
            bs::Params params{{"n_values", bsup_n}, {"r", bsup_r}, {"snr", snr}, {"n_f", bsup_nf},
                              {"psi_m", bsup_psi_m}, {"tol_b", bsup_tol}};
            bs::SweepResult result{"bsup", {{"N", "-"}, {"b_sup", "-"}, {"b_sup_times_N", "-"}, {"b_infeasible", "-"}}, {}, params};
            std::vector<bs::BsupEstimate> estimates(bsup_n.size());
            bs::parallel_for(bsup_n.size(), [&](std::size_t i)
                             { estimates[i] = bs::estimate_bsup(bs::ArrayConfig(bsup_n[i]), bsup_r, snr, bsup_nf,
                                                                bsup_psi_m, {bsup_tol, 60}); });
            std::vector<bs::BsupSample> samples;
            for (std::size_t i = 0; i < bsup_n.size(); ++i)
            {
                result.add_row({static_cast<double>(bsup_n[i]), estimates[i].b_sup,
                                estimates[i].b_sup * bsup_n[i], estimates[i].infeasible});
                samples.push_back({bsup_n[i], estimates[i].b_sup});
            }
            try
            {
                const auto fit = bs::fit_bsup_constant(std::span<const bs::BsupSample>(samples));
                result.params["fit_a"] = fit.a;
                result.params["fit_max_relative_deviation"] = fit.max_relative_deviation;
            }
            catch (const bs::ConfigError &)
            {
                // fewer than three array sizes: no fit
            }
            emit(result, bsup_out);
        }
        else if (*sweep_cmd)
        {
            bs::Params overrides = parse_params_overrides(sweep_params_json, sweep_params_file);
            if (!sweep_n.empty())
            {
                if (sweep_kind == "gain-pattern")
                    overrides["n"] = sweep_n.front();
                else if (sweep_kind == "codebook-size-vs-n")
                {
                    overrides["n_min"] = sweep_n.front();
                    overrides["n_max"] = sweep_n.back();
                }
                else
                    overrides["n_values"] = sweep_n;
            }
            if (sweep_snr_db)
                overrides["snr"] = db_to_linear(*sweep_snr_db);
            if (sweep_nf)
                overrides["n_f"] = *sweep_nf;
            if (sweep_r)
                overrides["r"] = *sweep_r;
            if (sweep_b)
                overrides["b"] = *sweep_b;
            if (sweep_psi_m)
                overrides["psi_m"] = *sweep_psi_m;

            std::string name = sweep_kind;
            for (char &c : name)
                if (c == '-')
                    c = '_';
            emit(bs::run_sweep(name, overrides), sweep_out);
        }
        else if (*verify_cmd)
        {
            verify_params.snr = db_to_linear(verify_snr_db);
            emit(bs::verify_facts(verify_params), verify_out);
        }
        return 0;
    }
    catch (const bs::InfeasibleError &e)
    {
        std::string_view detail = e.what();
        constexpr std::string_view prefix = "no codebook exists: ";
        if (detail.starts_with(prefix))
            detail.remove_prefix(prefix.size());
        std::ostringstream msg;
        msg << "no codebook exists (failing focus " << bs::format_number(e.position()) << "): " << detail;
        std::cerr << msg.str() << '\n';
        return kExitInfeasible;
    }
    catch (const CLI::ValidationError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const bs::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const bs::DomainError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const nlohmann::json::exception &e)
    {
        std::cerr << "error: invalid sweep parameters: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
