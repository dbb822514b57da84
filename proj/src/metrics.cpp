// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "catts/error.hpp"

namespace catts {

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::Origin: return "origin";
    case Condition::Noised: return "noised";
    case Condition::Occlusion: return "occlusion";
    case Condition::Viewpoint: return "viewpoint";
    case Condition::Mosaic: return "mosaic";
    case Condition::Other: return "other";
  }
  return "other";
}

Condition parse_condition(std::string_view text) noexcept {
  if (text == "origin" || text == "original") return Condition::Origin;
  if (text == "noised") return Condition::Noised;
  if (text == "occlusion") return Condition::Occlusion;
  if (text == "viewpoint") return Condition::Viewpoint;
  if (text == "mosaic") return Condition::Mosaic;
  return Condition::Other;
}

double ece(std::span<const OutcomeRecord> records, std::size_t bins) {
  if (records.empty()) throw Error(Errc::NoRecords, "ECE needs at least one record");
  if (bins < 1) throw Error(Errc::OutOfRange, "ECE needs at least one bin");
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<double> hits(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  const auto b = static_cast<double>(bins);
  for (const auto& r : records) {
    if (!(r.certainty > 0.0 && r.certainty <= 1.0)) {
      throw Error(Errc::OutOfRange, "certainty " + std::to_string(r.certainty) + " outside (0, 1]");
    }
    const double idx = std::ceil(r.certainty * b) - 1.0;
    const auto bin = static_cast<std::size_t>(std::clamp(idx, 0.0, b - 1.0));
    conf_sum[bin] += r.certainty;
    hits[bin] += r.correct ? 1.0 : 0.0;
    ++count[bin];
  }
  const auto n = static_cast<double>(records.size());
  double total = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    if (count[i] == 0) continue;
    const auto c = static_cast<double>(count[i]);
    total += (c / n) * std::abs(hits[i] / c - conf_sum[i] / c);
  }
  return total;
}

double auroc(std::span<const OutcomeRecord> records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].certainty < records[b].certainty;
  });

  // Mid-ranks (1-based) over tie groups; rank sums stay multiples of ½.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && records[order[j]].certainty == records[order[i]].certainty) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (records[order[t]].correct) {
        positive_rank_sum += mid;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = records.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(Errc::DegenerateClasses, "AUROC needs both correct and incorrect records");
  }
  const auto p = static_cast<double>(positives);
  const double wins = positive_rank_sum - p * (p + 1.0) / 2.0;
  return wins / (p * static_cast<double>(negatives));
}

double mean_certainty(std::span<const OutcomeRecord> records) {
  if (records.empty()) throw Error(Errc::NoRecords, "no records");
  double sum = 0.0;
  for (const auto& r : records) sum += r.certainty;
  return sum / static_cast<double>(records.size());
}

double accuracy(std::span<const OutcomeRecord> records) {
  if (records.empty()) throw Error(Errc::NoRecords, "no records");
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [](const OutcomeRecord& r) { return r.correct; });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double confidence_drop(std::span<const OutcomeRecord> origin,
                       std::span<const OutcomeRecord> perturbed) {
  if (origin.empty() || perturbed.empty()) {
    throw Error(Errc::NoRecords, "confidence drop needs origin and perturbed records");
  }
  return mean_certainty(perturbed) - mean_certainty(origin);
}

SlopeFit scaling_slope(std::span<const ScalingPoint> points) {
  std::set<int> distinct;
  for (const auto& p : points) {
    if (p.n < 1) throw Error(Errc::OutOfRange, "sample count must be >= 1");
    distinct.insert(p.n);
  }
  if (distinct.size() < 2) {
    throw Error(Errc::DegenerateDesign, "slope fit needs at least two distinct sample counts");
  }
  const auto m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += std::log2(static_cast<double>(p.n));
    my += p.accuracy;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log2(static_cast<double>(p.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (p.accuracy - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

CalibrationReport calibration_report(std::span<const OutcomeRecord> records, std::size_t bins,
                                     std::span<const OutcomeRecord> origin) {
  CalibrationReport report;
  report.count = records.size();
  report.accuracy = accuracy(records);
  report.mean_certainty = mean_certainty(records);
  report.ece = ece(records, bins);
  const bool both = std::any_of(records.begin(), records.end(), [](auto& r) { return r.correct; }) &&
                    std::any_of(records.begin(), records.end(), [](auto& r) { return !r.correct; });
  if (both) report.auroc = auroc(records);
  if (!origin.empty()) report.confidence_drop = confidence_drop(origin, records);
  return report;
}

}  // namespace catts
