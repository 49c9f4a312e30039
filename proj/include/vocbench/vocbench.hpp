// Copyright 2026 The vocbench Authors
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

#pragma once

// Umbrella header.
#include "vocbench/annotation.hpp"
#include "vocbench/augmentation.hpp"
#include "vocbench/calibration.hpp"
#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"
#include "vocbench/geometry.hpp"
#include "vocbench/manifest.hpp"
#include "vocbench/metrics.hpp"
#include "vocbench/plot.hpp"
#include "vocbench/raster.hpp"
#include "vocbench/raster_io.hpp"
#include "vocbench/report.hpp"
#include "vocbench/rng.hpp"
#include "vocbench/tiling.hpp"
#include "vocbench/voc_io.hpp"
