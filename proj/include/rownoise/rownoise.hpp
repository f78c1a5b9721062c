// Copyright 2026 The rownoise Authors. All Rights Reserved.
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

#ifndef ROWNOISE_ROWNOISE_HPP_
#define ROWNOISE_ROWNOISE_HPP_

#include "rownoise/config.hpp"
#include "rownoise/counter_rng.hpp"
#include "rownoise/errors.hpp"
#include "rownoise/flicker.hpp"
#include "rownoise/format.hpp"
#include "rownoise/frame.hpp"
#include "rownoise/image_io.hpp"
#include "rownoise/mitigation.hpp"
#include "rownoise/physics.hpp"
#include "rownoise/plot.hpp"
#include "rownoise/report.hpp"
#include "rownoise/row_noise.hpp"
#include "rownoise/sensor_sim.hpp"
#include "rownoise/sweep.hpp"

#endif  // ROWNOISE_ROWNOISE_HPP_
