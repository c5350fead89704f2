// Copyright 2026 The vtract Authors.
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

#pragma once

#include <cstddef>
#include <exception>
#include <string>

namespace vtract {

// Selects between the OpenMP kernels and the serial reference loops. Both
// paths produce bit-identical results; the serial path is kept for testing
// and benchmarking.
enum class Execution { serial, parallel };

Execution parse_execution(const std::string& name);
const char* to_string(Execution ex);

// Runs body(i) for i in [0, n). Under Execution::parallel iterations are
// distributed over OpenMP threads; the first exception thrown by any
// iteration is rethrown on the calling thread after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution ex, Body&& body) {
  if (ex == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(vtract_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vtract
