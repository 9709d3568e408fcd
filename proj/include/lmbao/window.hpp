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
#pragma once

#include <deque>
#include <map>
#include <optional>

#include "lmbao/landmark_map.hpp"
#include "lmbao/motion_model.hpp"

namespace lmbao {

struct WindowEntry {
  int scan_index = 0;
  MotionState state;
};

/// The most recent `capacity` scan states plus the table of fixed states of
/// every scan that has slid out.
class SlidingWindow {
 public:
  explicit SlidingWindow(int capacity = 4);

  int capacity() const { return capacity_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return static_cast<int>(entries_.size()) >= capacity_; }

  const std::deque<WindowEntry>& entries() const { return entries_; }
  const std::map<int, MotionState>& fixed() const { return fixed_; }

  /// Appends the newest scan. Throws when full or when scan_index does not
  /// exceed every scan already held.
  void push(int scan_index, const MotionState& state);

  /// Replaces the window states in order; sizes must match.
  void set_states(const std::vector<MotionState>& states);

  /// Moves the oldest entry into the fixed table and returns it.
  WindowEntry pop_oldest();

  /// Window or fixed state of a scan.
  std::optional<MotionState> state_of(int scan_index) const;

  /// Most recently fixed scan, if any.
  const WindowEntry* last_fixed() const { return has_last_fixed_ ? &last_fixed_ : nullptr; }

 private:
  int capacity_;
  std::deque<WindowEntry> entries_;
  std::map<int, MotionState> fixed_;
  WindowEntry last_fixed_;
  bool has_last_fixed_ = false;
};

/// Slides the oldest scan out of the window: its current state becomes its
/// fixed state and its landmark points are folded into the marginal moments.
WindowEntry marginalize_scan(LandmarkMap& map, SlidingWindow& window);

}  // namespace lmbao
