// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <string_view>

namespace catts {

/// Writes a warning to stderr through the shared logger.
void log_warning(std::string_view message);
void log_info(std::string_view message);

/// "off", "error", "warn", "info" or "debug".
void set_log_level(std::string_view level);

}  // namespace catts
