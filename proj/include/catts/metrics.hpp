// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Calibration and scaling instruments over (certainty, correct) outcomes.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catts {

enum class Condition { Origin, Noised, Occlusion, Viewpoint, Mosaic, Other };

std::string_view to_string(Condition c) noexcept;
/// Unknown names map to Other.
Condition parse_condition(std::string_view text) noexcept;

struct OutcomeRecord {
  double certainty;  // (0, 1]
  bool correct;
  Condition condition = Condition::Origin;
};

/// Bin-weighted |accuracy − mean certainty| over equal-width bins on (0, 1];
/// bin b covers (b/B, (b+1)/B].
double ece(std::span<const OutcomeRecord> records, std::size_t bins = 10);

/// Probability a correct record outranks an incorrect one (ties count ½).
double auroc(std::span<const OutcomeRecord> records);

/// mean certainty(perturbed) − mean certainty(origin).
double confidence_drop(std::span<const OutcomeRecord> origin,
                       std::span<const OutcomeRecord> perturbed);

double accuracy(std::span<const OutcomeRecord> records);
double mean_certainty(std::span<const OutcomeRecord> records);

struct ScalingPoint {
  int n;            // sample count
  double accuracy;  // percent
};

struct SlopeFit {
  double slope;
  double intercept;
};

/// Least-squares fit of accuracy = intercept + slope·log2(n).
SlopeFit scaling_slope(std::span<const ScalingPoint> points);

struct CalibrationReport {
  std::size_t count = 0;
  double accuracy = 0.0;
  double mean_certainty = 0.0;
  double ece = 0.0;
  std::optional<double> auroc;              // absent when one class is empty
  std::optional<double> confidence_drop;    // absent without an origin reference
};

/// ECE, accuracy and (when defined) AUROC; CD against `origin` if given.
CalibrationReport calibration_report(std::span<const OutcomeRecord> records, std::size_t bins,
                                     std::span<const OutcomeRecord> origin = {});

}  // namespace catts
