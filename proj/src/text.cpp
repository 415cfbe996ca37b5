// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/text.hpp"

#include <cstdint>

namespace rankfair::text {

namespace {

// Decodes one code point starting at s[i]; returns its byte length, or 0 on
// malformed input.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    return len;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_turkic(std::string_view language) { return language == "tr" || language == "az"; }

char32_t lower(char32_t cp, std::string_view language) {
    if (cp == U'I' && is_turkic(language)) return 0x0131;  // dotless i
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x0178) return 0x00FF;  // Ÿ
    if (cp == 0x1E9E) return 0x00DF;  // ẞ
    if (cp >= 0x0100 && cp <= 0x0137 && cp % 2 == 0) return cp + 1;
    if (cp >= 0x0139 && cp <= 0x0148 && cp % 2 == 1) return cp + 1;
    if (cp >= 0x014A && cp <= 0x0177 && cp % 2 == 0) return cp + 1;
    if (cp >= 0x0179 && cp <= 0x017E && cp % 2 == 1) return cp + 1;
    return cp;
}

}  // namespace

std::string to_lower(std::string_view utf8, std::string_view language) {
    std::string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        char32_t cp = 0;
        const std::size_t len = decode(utf8, i, cp);
        if (len == 0) {
            out.push_back(utf8[i]);
            ++i;
            continue;
        }
        if (cp == 0x0130) {
            // Capital I with dot: plain i in Turkic languages, otherwise
            // i followed by a combining dot above.
            out.push_back('i');
            if (!is_turkic(language)) encode(0x0307, out);
        } else {
            encode(lower(cp, language), out);
        }
        i += len;
    }
    return out;
}

bool is_lowercase(std::string_view utf8) { return to_lower(utf8) == utf8; }

std::string_view trim(std::string_view s) {
    constexpr std::string_view kSpace = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(kSpace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kSpace);
    return s.substr(first, last - first + 1);
}

}  // namespace rankfair::text
