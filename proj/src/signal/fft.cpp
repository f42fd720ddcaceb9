// Copyright 2026 The jamforge Authors.
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

#include "jamforge/signal/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace jamforge {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(int n, FftDirection direction) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(n, direction == FftDirection::Forward);
    auto it = plans_.find(key);
    if (it != plans_.end()) {
      return it->second;
    }
    // FFTW_ESTIMATE never touches the arrays, so scratch buffers suffice; the
    // planner itself is not thread-safe, hence the lock.
    // Planned in place: new-array execution must match the plan's placement.
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, scratch.data(), scratch.data(),
                                      direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft_inplace(std::span<Complex> data, FftDirection direction) {
  if (data.empty()) {
    return;
  }
  fftw_plan plan = plan_cache().get(static_cast<int>(data.size()), direction);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace jamforge
