// Copyright 2026 The opspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPSPACE_OPSPACE_HPP
#define OPSPACE_OPSPACE_HPP

#include "opspace/clebsch_gordan.hpp"
#include "opspace/dynamics.hpp"
#include "opspace/io.hpp"
#include "opspace/lattice.hpp"
#include "opspace/linalg.hpp"
#include "opspace/perturbative.hpp"
#include "opspace/spectral.hpp"
#include "opspace/spin.hpp"
#include "opspace/superop.hpp"
#include "opspace/tensor_basis.hpp"

#endif  // OPSPACE_OPSPACE_HPP
