#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stylo {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct StyloError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : StyloError {
    using StyloError::StyloError;
};

struct MalformedManifest : StyloError {
    int row;
    MalformedManifest(int row_, const std::string& what_)
        : StyloError("manifest row " + std::to_string(row_) + ": " + what_), row(row_) {}
};

struct MalformedConllu : StyloError {
    int line;
    MalformedConllu(int line_, const std::string& reason)
        : StyloError("conllu line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct MalformedLexicon : StyloError {
    int line;
    MalformedLexicon(int line_, const std::string& reason)
        : StyloError("lexicon line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct EmptyCorpus : StyloError {
    using StyloError::StyloError;
};

struct EmptyDocument : StyloError {
    using StyloError::StyloError;
};

struct TooShort : StyloError {
    using StyloError::StyloError;
};

struct DimensionMismatch : StyloError {
    using StyloError::StyloError;
};

struct NonConvergence : StyloError {
    using StyloError::StyloError;
};

struct ShapeMismatch : StyloError {
    using StyloError::StyloError;
};

struct NonFiniteUpdate : StyloError {
    using StyloError::StyloError;
};

struct NonFiniteCoordinate : StyloError {
    using StyloError::StyloError;
};

struct InvalidTransitionMatrix : StyloError {
    using StyloError::StyloError;
};

struct MalformedCheckpoint : StyloError {
    using StyloError::StyloError;
};

struct PipelineError : StyloError {
    std::string stage;
    PipelineError(const std::string& stage_, const std::string& what_)
        : StyloError("stage " + stage_ + ": " + what_), stage(stage_) {}
};

// ---------------------------------------------------------------------------
// Deterministic randomness
//
// All randomized steps run off mt19937_64 plus the helpers below, never off
// std::*_distribution, whose output is implementation-defined. Results are
// therefore reproducible across standard libraries for a fixed seed.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// In-place Fisher-Yates shuffle with our own bounded draw.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Draw an index from a discrete distribution given as (not necessarily
/// normalized) non-negative weights. Falls back to the last index on
/// rounding spill.
inline std::size_t sample_discrete(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// FNV-1a over bytes; stable across platforms, used to derive per-author and
/// per-document RNG streams from a master seed.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Shortest decimal form that round-trips a double ("%.17g" fallback).
std::string format_full(double v);

/// Fixed-point with the given number of decimals; used by SVG emitters so
/// identical inputs yield byte-identical output.
std::string format_fixed(double v, int decimals);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Parse one CSV record (RFC-4180 quoting). Returns false on an unterminated
/// quoted field.
bool csv_parse_line(const std::string& line, std::vector<std::string>& out);

/// Quote a field if it contains a comma, quote, or newline.
std::string csv_field(const std::string& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return s.substr(b, e - b);
}

}  // namespace stylo

// -- inline implementations --------------------------------------------------

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stylo {

inline std::string format_full(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    if (v == 0.0) v = 0.0;  // normalize -0
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline bool csv_parse_line(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
            } else {
                field += c;
                ++i;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            ++i;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
            ++i;
        } else {
            field += c;
            ++i;
        }
    }
    if (quoted) return false;
    out.push_back(field);
    return true;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += '"';
    return q;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace stylo
