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


#ifndef BEAMSQUINT_IO_HPP
#define BEAMSQUINT_IO_HPP

#include "codebook.hpp"
#include "errors.hpp"
#include "sweep_result.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace beamsquint
{
    /// Shortest decimal that parses back to the same double ("C" locale, no grouping).
    inline std::string format_number(double v)
    {
        if (!std::isfinite(v))
            return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        if (res.ec != std::errc{})
            throw Error("number formatting failed");
        return std::string(buf, res.ptr);
    }

    /// Marker written for empty cells.
    inline constexpr const char *kMissingCell = "infeasible";

    /// Header `label[unit],...` then one line per row, LF terminated.
    inline std::string to_csv(const SweepResult &result)
    {
        std::string out;
        for (std::size_t i = 0; i < result.columns.size(); ++i)
        {
            if (i)
                out += ',';
            out += result.columns[i].label + '[' + result.columns[i].unit + ']';
        }
        out += '\n';
        for (const auto &row : result.rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
            {
                if (i)
                    out += ',';
                out += row[i] ? format_number(*row[i]) : kMissingCell;
            }
            out += '\n';
        }
        return out;
    }

    inline nlohmann::ordered_json to_json(const SweepResult &result)
    {
        nlohmann::ordered_json j;
        j["name"] = result.name;
        j["params"] = result.params;
        auto &cols = j["columns"] = nlohmann::ordered_json::array();
        for (const auto &c : result.columns)
            cols.push_back({{"label", c.label}, {"unit", c.unit}});
        auto &rows = j["rows"] = nlohmann::ordered_json::array();
        for (const auto &row : result.rows)
        {
            auto jr = nlohmann::ordered_json::array();
            for (const auto &cell : row)
                jr.push_back(cell ? nlohmann::ordered_json(*cell) : nlohmann::ordered_json(nullptr));
            rows.push_back(std::move(jr));
        }
        return j;
    }

    inline SweepResult sweep_from_json(const nlohmann::ordered_json &j)
    {
        SweepResult out;
        out.name = j.at("name").get<std::string>();
        out.params = j.at("params");
        for (const auto &c : j.at("columns"))
            out.columns.push_back({c.at("label").get<std::string>(), c.at("unit").get<std::string>()});
        for (const auto &jr : j.at("rows"))
        {
            std::vector<Cell> row;
            for (const auto &cell : jr)
                row.push_back(cell.is_null() ? Cell{} : Cell{cell.get<double>()});
            out.add_row(std::move(row));
        }
        return out;
    }

    /// Codebook as {n, b, n_f, snr, psi_m, r | c_t, parity, beams}.
    inline nlohmann::ordered_json to_json(const Codebook &cb)
    {
        nlohmann::ordered_json j;
        j["n"] = cb.n_antennas;
        j["b"] = cb.b;
        j["n_f"] = cb.n_f;
        j["snr"] = cb.snr;
        j["psi_m"] = cb.psi_m;
        if (cb.r)
            j["r"] = *cb.r;
        else
            j["c_t"] = cb.c_t;
        j["parity"] = std::string(to_string(cb.parity));
        auto &beams = j["beams"] = nlohmann::ordered_json::array();
        for (const Beam &beam : cb.beams)
        {
            beams.push_back({{"focus", beam.focus},
                             {"left", beam.left},
                             {"right", beam.right},
                             {"width", beam.width()},
                             {"phases", beam.phases.phases}});
        }
        return j;
    }

    /// Inverse of to_json(Codebook). A threshold given as r is restored per unit bandwidth.
    inline Codebook codebook_from_json(const nlohmann::ordered_json &j)
    {
        Codebook cb;
        cb.n_antennas = j.at("n").get<int>();
        cb.b = j.at("b").get<double>();
        cb.n_f = j.at("n_f").get<int>();
        cb.snr = j.at("snr").get<double>();
        cb.psi_m = j.at("psi_m").get<double>();
        if (j.contains("r"))
        {
            cb.r = j.at("r").get<double>();
            cb.c_t = std::log2(1.0 + *cb.r * *cb.r * cb.n_antennas * cb.snr);
        }
        else
        {
            cb.c_t = j.at("c_t").get<double>();
        }
        cb.parity = parse_parity(j.at("parity").get<std::string>());
        for (const auto &jb : j.at("beams"))
        {
            Beam beam;
            beam.focus = jb.at("focus").get<double>();
            beam.left = jb.at("left").get<double>();
            beam.right = jb.at("right").get<double>();
            beam.phases.focus = beam.focus;
            beam.phases.phases = jb.at("phases").get<std::vector<double>>();
            cb.beams.push_back(std::move(beam));
        }
        return cb;
    }

    inline std::string dump(const nlohmann::ordered_json &j)
    {
        return j.dump(2) + '\n';
    }

} // namespace beamsquint

#endif
