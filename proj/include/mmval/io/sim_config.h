/*
 * Copyright 2026 The mmval Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MMVAL_IO_SIM_CONFIG_H_
#define MMVAL_IO_SIM_CONFIG_H_

#include <string>
#include <string_view>

#include "mmval/sim/dataset.h"
#include "mmval/sim/model.h"
#include "mmval/sim/trainer.h"

namespace mmval::io {

// Simulator run description loaded from TOML with the tables [dataset],
// [model], [train] and [modulation]. Every key is optional and falls back to
// the struct default; unknown keys are rejected.
struct SimConfig {
  sim::SyntheticSpec dataset;
  // False when [dataset] omits `seed`; the CLI then reuses the run seed.
  bool dataset_seed_set = false;
  sim::ModelConfig model;
  sim::TrainConfig train;
  sim::ModulationConfig modulation;
};

// Throws ParseError (with the TOML line) or InvalidArgument.
SimConfig ParseSimConfig(std::string_view text);
// Throws Error(IoError) if the file cannot be read.
SimConfig LoadSimConfig(const std::string& path);

}  // namespace mmval::io

#endif  // MMVAL_IO_SIM_CONFIG_H_
