// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace rankfair::text {

/// Lowercases UTF-8 text. Covers ASCII, Latin-1 Supplement, Latin Extended-A
/// and capital sharp s, which is what the supported languages (de, es, fr,
/// pt) need. `language` selects language-specific folds; unknown tags fall
/// back to the default mapping. Malformed UTF-8 is copied through unchanged.
std::string to_lower(std::string_view utf8, std::string_view language = {});

/// True when `to_lower` would leave the text unchanged.
bool is_lowercase(std::string_view utf8);

std::string_view trim(std::string_view s);

}  // namespace rankfair::text
