// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catts {

enum class Errc {
  // confidence
  EmptyTopK,
  PositiveLogProb,
  EmptyTrace,
  NegativeNmlp,
  BadWindow,
  InsufficientDepth,
  // vote
  NoSamples,
  ZeroMass,
  BallotMismatch,
  UnnormalizedBallot,
  EmptyTally,
  // vcd
  LengthMismatch,
  EmptyInput,
  // reward
  EmptyGroundTruth,
  BadPattern,
  BadHyper,
  SupportMismatch,
  AbsoluteContinuityViolation,
  // calibtrain
  NonFiniteGradient,
  // expert / prompts
  CritiqueUnavailable,
  BackendUnavailable,
  UnboundPlaceholder,
  // backend
  Timeout,
  Transport,
  MalformedResponse,
  MissingLogprobs,
  SchemaViolation,
  MissingScenarioEntry,
  // metrics
  NoRecords,
  DegenerateClasses,
  DegenerateDesign,
  // noisegen
  DimMismatch,
  MalformedHeader,
  TruncatedBody,
  // shared
  OutOfRange,
  // harness
  Config,
  Io,
  Dataset,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace catts
