// Copyright 2026 The combmem Authors
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
#include <string>

namespace combmem {

/// Receives non-fatal numerical warnings (clamped k2, coarse PDE steps, ...).
using WarningHandler = std::function<void(const std::string&)>;

/// Installs a process-wide handler and returns the previous one. The default
/// handler prints "warning: <msg>" to stderr. Calls are serialized.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace combmem
