// Copyright 2026 The roiaug Authors
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

// Umbrella header for the whole library.

#include "roiaug/augment.hpp"
#include "roiaug/box.hpp"
#include "roiaug/cli.hpp"
#include "roiaug/error.hpp"
#include "roiaug/image.hpp"
#include "roiaug/labels.hpp"
#include "roiaug/manifest.hpp"
#include "roiaug/mask.hpp"
#include "roiaug/metrics.hpp"
#include "roiaug/png_io.hpp"
#include "roiaug/preprocess.hpp"
#include "roiaug/rng.hpp"
#include "roiaug/split.hpp"
