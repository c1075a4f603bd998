#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stylo {

// UTF-8 helpers for the baseline tokenizer. Coverage is ASCII plus the
// Latin-1/Latin-Extended-A and General Punctuation ranges that occur in
// European literary text; anything undecodable passes through untouched.

inline constexpr std::uint32_t kReplacementChar = 0xFFFD;

/// Decode one UTF-8 codepoint starting at s[i]; advances i past it.
inline std::uint32_t utf8_next(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
    if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
        std::uint32_t cp = (std::uint32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        std::uint32_t cp = (std::uint32_t(b0 & 0x0F) << 12) | (std::uint32_t(byte(i + 1) & 0x3F) << 6) |
                           (byte(i + 2) & 0x3F);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        std::uint32_t cp = (std::uint32_t(b0 & 0x07) << 18) | (std::uint32_t(byte(i + 1) & 0x3F) << 12) |
                           (std::uint32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
        i += 4;
        return cp;
    }
    ++i;
    return kReplacementChar;
}

inline void utf8_append(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline bool is_space_cp(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

inline bool is_punct_cp(std::uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
        case 0xA1:   // inverted exclamation
        case 0xA7:   // section sign
        case 0xAB:   // left guillemet
        case 0xAD:   // soft hyphen
        case 0xB7:   // middle dot
        case 0xBB:   // right guillemet
        case 0xBF:   // inverted question mark
            return true;
        default:
            // General Punctuation block: dashes, curly and low-9 quotes,
            // ellipsis, daggers, primes, single guillemets.
            return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E);
    }
}

inline bool is_digit_cp(std::uint32_t cp) { return cp >= '0' && cp <= '9'; }

/// Codepoint-wise lowercase covering ASCII, Latin-1 and Latin Extended-A.
inline std::uint32_t lower_cp(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x177 && (cp & 1) == 0) return cp + 1;
    if (cp == 0x178) return 0xFF;
    if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
    return cp;
}

inline std::string lowercase(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        utf8_append(out, lower_cp(utf8_next(s, i)));
    }
    return out;
}

/// True when every codepoint of the token is punctuation.
inline bool is_punct_token(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_punct_cp(utf8_next(s, i))) return false;
    }
    return true;
}

/// Split text on Unicode whitespace, then peel leading and trailing
/// punctuation codepoints off each chunk into tokens of their own.
/// "„Ja“, sagte er." -> „ Ja “ , sagte er .
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::vector<std::uint32_t> chunk;
    std::string scratch;

    auto emit_cp = [&](std::uint32_t cp) {
        scratch.clear();
        utf8_append(scratch, cp);
        tokens.push_back(scratch);
    };
    auto flush = [&]() {
        if (chunk.empty()) return;
        std::size_t b = 0, e = chunk.size();
        while (b < e && is_punct_cp(chunk[b])) ++b;
        std::size_t core_end = e;
        while (core_end > b && is_punct_cp(chunk[core_end - 1])) --core_end;
        for (std::size_t k = 0; k < b; ++k) emit_cp(chunk[k]);
        if (core_end > b) {
            scratch.clear();
            for (std::size_t k = b; k < core_end; ++k) utf8_append(scratch, chunk[k]);
            tokens.push_back(scratch);
        }
        for (std::size_t k = core_end; k < e; ++k) emit_cp(chunk[k]);
        chunk.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const std::uint32_t cp = utf8_next(text, i);
        if (is_space_cp(cp)) {
            flush();
        } else {
            chunk.push_back(cp);
        }
    }
    flush();
    return tokens;
}

}  // namespace stylo
