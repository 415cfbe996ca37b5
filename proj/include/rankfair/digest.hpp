// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rankfair {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents; throws ValidationError if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace rankfair
