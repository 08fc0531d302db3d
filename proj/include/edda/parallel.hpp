// Copyright 2026 The EDDA Authors.
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

#ifndef EDDA_PARALLEL_HPP_
#define EDDA_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace edda {

// Runs fn(i) for i in [0, n) on up to `threads` threads. Work is split into
// contiguous blocks; callers must make each fn(i) write only to slot i so the
// result does not depend on the thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Deterministic stream seed for a sub-component ("split", "walk", ...) or a
// keyed entity under a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace edda

#endif  // EDDA_PARALLEL_HPP_
