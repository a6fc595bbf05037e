// Copyright 2026 The splnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLNOISE_SPLNOISE_HPP
#define SPLNOISE_SPLNOISE_HPP

#include "splnoise/pauli.hpp"
#include "splnoise/clifford.hpp"
#include "splnoise/model.hpp"
#include "splnoise/twirl.hpp"
#include "splnoise/layer.hpp"
#include "splnoise/coverarray.hpp"
#include "splnoise/basisselect.hpp"
#include "splnoise/learn.hpp"

#endif  // SPLNOISE_SPLNOISE_HPP
