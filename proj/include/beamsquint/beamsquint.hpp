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


#ifndef BEAMSQUINT_BEAMSQUINT_HPP
#define BEAMSQUINT_BEAMSQUINT_HPP

#include "array_model.hpp"
#include "bisection.hpp"
#include "capacity.hpp"
#include "codebook.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "sweep_result.hpp"

#endif
