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


#ifndef BEAMSQUINT_SWEEP_RESULT_HPP
#define BEAMSQUINT_SWEEP_RESULT_HPP

#include "errors.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace beamsquint
{
    struct Column
    {
        std::string label;
        std::string unit; // "-" for dimensionless
    };

    /// Empty cells mark points with no value (an infeasible design, for instance).
    using Cell = std::optional<double>;

    /// Labelled table produced by a sweep together with the parameters that regenerate it.
    struct SweepResult
    {
        std::string name;
        std::vector<Column> columns;
        std::vector<std::vector<Cell>> rows;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();

        void add_row(std::vector<Cell> row)
        {
            if (row.size() != columns.size())
                throw Error("row arity " + std::to_string(row.size()) + " does not match " +
                            std::to_string(columns.size()) + " columns in " + name);
            rows.push_back(std::move(row));
        }
    };

} // namespace beamsquint

#endif
