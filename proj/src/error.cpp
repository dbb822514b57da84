// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/error.hpp"

namespace catts {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyTopK: return "EmptyTopK";
    case Errc::PositiveLogProb: return "PositiveLogProb";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::NegativeNmlp: return "NegativeNmlp";
    case Errc::BadWindow: return "BadWindow";
    case Errc::InsufficientDepth: return "InsufficientDepth";
    case Errc::NoSamples: return "NoSamples";
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::BallotMismatch: return "BallotMismatch";
    case Errc::UnnormalizedBallot: return "UnnormalizedBallot";
    case Errc::EmptyTally: return "EmptyTally";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyGroundTruth: return "EmptyGroundTruth";
    case Errc::BadPattern: return "BadPattern";
    case Errc::BadHyper: return "BadHyper";
    case Errc::SupportMismatch: return "SupportMismatch";
    case Errc::AbsoluteContinuityViolation: return "AbsoluteContinuityViolation";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::CritiqueUnavailable: return "CritiqueUnavailable";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::UnboundPlaceholder: return "UnboundPlaceholder";
    case Errc::Timeout: return "Timeout";
    case Errc::Transport: return "Transport";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::MissingLogprobs: return "MissingLogprobs";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::MissingScenarioEntry: return "MissingScenarioEntry";
    case Errc::NoRecords: return "NoRecords";
    case Errc::DegenerateClasses: return "DegenerateClasses";
    case Errc::DegenerateDesign: return "DegenerateDesign";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedBody: return "TruncatedBody";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
    case Errc::Dataset: return "Dataset";
  }
  return "Unknown";
}

}  // namespace catts
