// pausekit/pausekit.hpp

// Copyright 2026  The pausekit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pausekit/acoustics.hpp"
#include "pausekit/error.hpp"
#include "pausekit/io.hpp"
#include "pausekit/labeling.hpp"
#include "pausekit/metrics.hpp"
#include "pausekit/model.hpp"
#include "pausekit/parallel.hpp"
#include "pausekit/sequences.hpp"
#include "pausekit/soft_dtw.hpp"
#include "pausekit/train.hpp"
#include "pausekit/transcript.hpp"
