/*
 * Copyright 2026 The voxscreen Authors.
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

#ifndef VOXSCREEN_CLI_HPP_
#define VOXSCREEN_CLI_HPP_

#include <cstdint>
#include <iosfwd>

namespace voxscreen {

// Entry point for the voxscreen command; returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// VOXSCREEN_SEED, or 0 when unset or unparsable.
std::uint64_t DefaultSeed();

}  // namespace voxscreen

#endif  // VOXSCREEN_CLI_HPP_
