// Copyright 2026 The VeilForge Authors
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

#include <functional>

namespace veilforge {

// Runs fn(i) for i in [0, n) across up to `threads` workers with a static
// contiguous partition. Callers must write results to per-index slots;
// combined with ordered reduction on the caller side, results are identical
// for every thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// Same, but also hands the worker index to fn so callers can use per-worker
// scratch state (e.g. model replicas) without sharing.
void parallel_for_workers(int n, int threads, const std::function<void(int worker, int index)>& fn);

// Default worker count: hardware concurrency capped at 8.
int default_threads();

} // namespace veilforge
