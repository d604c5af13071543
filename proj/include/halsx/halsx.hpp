// Copyright 2026 The HALSX Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Everything in one include.

#ifndef HALSX_HALSX_HPP_
#define HALSX_HALSX_HPP_

#include "halsx/bench.hpp"
#include "halsx/common.hpp"
#include "halsx/identifiability.hpp"
#include "halsx/io.hpp"
#include "halsx/linkmodels.hpp"
#include "halsx/operators.hpp"
#include "halsx/solver.hpp"
#include "halsx/solver2.hpp"
#include "halsx/splines.hpp"

#endif  // HALSX_HALSX_HPP_
