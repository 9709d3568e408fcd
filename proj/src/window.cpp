// Copyright 2026 The LMBAO Authors
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
#include "lmbao/window.hpp"

#include <stdexcept>

namespace lmbao {

SlidingWindow::SlidingWindow(int capacity) : capacity_(capacity) {
  if (capacity < 2) throw std::invalid_argument("SlidingWindow: capacity must be at least 2");
}

void SlidingWindow::push(int scan_index, const MotionState& state) {
  if (full()) throw std::logic_error("SlidingWindow: window is full");
  const int newest = !entries_.empty() ? entries_.back().scan_index
                     : has_last_fixed_ ? last_fixed_.scan_index
                                       : -1;
  if (scan_index <= newest) throw std::invalid_argument("SlidingWindow: scans must arrive in order");
  entries_.push_back({scan_index, state});
}

void SlidingWindow::set_states(const std::vector<MotionState>& states) {
  if (states.size() != entries_.size()) {
    throw std::invalid_argument("SlidingWindow: state count does not match window size");
  }
  for (size_t i = 0; i < states.size(); ++i) entries_[i].state = states[i];
}

WindowEntry SlidingWindow::pop_oldest() {
  if (entries_.empty()) throw std::logic_error("SlidingWindow: window is empty");
  WindowEntry e = entries_.front();
  entries_.pop_front();
  fixed_.emplace(e.scan_index, e.state);
  last_fixed_ = e;
  has_last_fixed_ = true;
  return e;
}

std::optional<MotionState> SlidingWindow::state_of(int scan_index) const {
  for (const auto& e : entries_) {
    if (e.scan_index == scan_index) return e.state;
  }
  auto it = fixed_.find(scan_index);
  if (it != fixed_.end()) return it->second;
  return std::nullopt;
}

WindowEntry marginalize_scan(LandmarkMap& map, SlidingWindow& window) {
  WindowEntry e = window.pop_oldest();
  map.marginalize_scan(e.scan_index, e.state);
  return e;
}

}  // namespace lmbao
