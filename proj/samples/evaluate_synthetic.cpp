// Copyright 2026 The vocbench Authors
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

// Evaluates a small hand-made detection set and calibrates its threshold.

#include <cstdio>
#include <vector>

#include "vocbench/vocbench.hpp"

int main() {
  namespace vb = vocbench;
  const vb::GroundTruthSet gts{
      {"frame0", {{"tomato", {10, 10, 60, 60}}, {"tomato", {100, 40, 150, 90}}}},
      {"frame1", {{"tomato", {30, 200, 80, 250}}}},
  };
  const std::vector<vb::Detection> dets = {
      {"frame0", "tomato", 0.92, {12, 9, 61, 58}},
      {"frame0", "tomato", 0.71, {98, 42, 149, 93}},
      {"frame0", "tomato", 0.35, {200, 200, 240, 240}},
      {"frame1", "tomato", 0.64, {28, 203, 79, 251}},
      {"frame1", "tomato", 0.22, {150, 10, 190, 50}},
  };

  const vb::EvalReport report = vb::Evaluate(dets, gts, vb::EvalConfig{});
  std::printf("all detections: mAP %s  P %s  R %s  F1 %s\n", vb::FormatPercent(report.map).c_str(),
              vb::FormatPercent(report.precision).c_str(),
              vb::FormatPercent(report.recall).c_str(), vb::FormatPercent(report.f1).c_str());

  const vb::SweepResult sweep = vb::Sweep(dets, gts, 0.5);
  vb::EvalConfig calibrated;
  calibrated.confidence_threshold = sweep.best_threshold_pct / 100.0;
  const vb::EvalReport at_best = vb::Evaluate(dets, gts, calibrated);
  std::printf("threshold %s: mAP %s  P %s  R %s  F1 %s\n",
              vb::FormatThresholdPct(sweep.best_threshold_pct).c_str(),
              vb::FormatPercent(at_best.map).c_str(), vb::FormatPercent(at_best.precision).c_str(),
              vb::FormatPercent(at_best.recall).c_str(), vb::FormatPercent(at_best.f1).c_str());
  return 0;
}
