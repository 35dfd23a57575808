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

#ifndef BEAMSQUINT_ERRORS_HPP
#define BEAMSQUINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beamsquint
{
    /// Base class of every error thrown by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid configuration (array size, band parameters, unsupported ratios).
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    /// Argument outside the mathematical domain of an operation.
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    /// Inputs for which a ratio or fit is undefined (zero denominators, too few samples).
    class DegenerateInputError : public Error
    {
    public:
        using Error::Error;
    };

    /// No beam satisfies the capacity threshold at a required position.
    /// `position()` is the virtual angle at which the search failed.
    class InfeasibleError : public Error
    {
    public:
        InfeasibleError(const std::string &what, double position)
            : Error(what), position_(position) {}

        double position() const noexcept { return position_; }

    private:
        double position_;
    };

} // namespace beamsquint

#endif
