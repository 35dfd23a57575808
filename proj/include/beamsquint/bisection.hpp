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

#ifndef BEAMSQUINT_BISECTION_HPP
#define BEAMSQUINT_BISECTION_HPP

#include <cmath>
#include <concepts>

namespace beamsquint
{
    struct BisectionOptions
    {
        double tolerance = 1e-10;
        int max_iterations = 200;
    };

    /// Locates the boundary of a predicate that holds at `inside` and fails at `outside`.
    ///
    /// The bracket may be given in either orientation. The returned point is the last
    /// probe on the `inside` side, so `holds(result)` is always true; the true boundary
    /// lies within `options.tolerance` of it. The predicate is assumed to switch exactly
    /// once inside the bracket.
    template <std::predicate<double> Predicate>
    double bisect_boundary(Predicate &&holds, double inside, double outside,
                           const BisectionOptions &options = {})
    {
        for (int i = 0; i < options.max_iterations; ++i)
        {
            if (std::abs(outside - inside) <= options.tolerance)
                break;
            const double mid = 0.5 * (inside + outside);
            if (holds(mid))
                inside = mid;
            else
                outside = mid;
        }
        return inside;
    }

} // namespace beamsquint

#endif
