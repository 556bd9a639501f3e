// SPDX-License-Identifier: Apache-2.0
//
// sparsebf: sparse receive array design for MaxSINR beamforming
// Copyright (C) 2026 The sparsebf authors
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

#ifndef SPARSEBF_SPARSEBF_HPP
#define SPARSEBF_SPARSEBF_HPP

#include "common.hpp"
#include "array_scene.hpp"
#include "selection.hpp"
#include "beamformer.hpp"
#include "sbsa.hpp"
#include "enumerate.hpp"
#include "snapshots.hpp"
#include "mlp.hpp"
#include "nnc.hpp"
#include "harness.hpp"

#endif
