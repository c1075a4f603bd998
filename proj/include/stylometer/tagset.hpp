#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace stylo {

// The 11-category coarse tagset. The index is the axis order shared by
// unigram vectors and both bigram matrix dimensions; reorder nothing.
enum class CoarseTag : int {
    NOUN = 0,
    VERB = 1,
    ADJ = 2,
    ADV = 3,
    PRON = 4,
    DET = 5,
    ADP = 6,
    CONJ = 7,
    NUM = 8,
    PART = 9,
    OTHER = 10,
};

inline constexpr int kTagCount = 11;

inline constexpr std::array<std::string_view, kTagCount> kTagNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CONJ", "NUM", "PART", "OTHER",
};

inline constexpr int tag_index(CoarseTag t) { return static_cast<int>(t); }

inline constexpr std::string_view tag_name(CoarseTag t) {
    return kTagNames[static_cast<std::size_t>(t)];
}

inline std::optional<CoarseTag> tag_from_name(std::string_view name) {
    for (int i = 0; i < kTagCount; ++i) {
        if (kTagNames[static_cast<std::size_t>(i)] == name) return static_cast<CoarseTag>(i);
    }
    return std::nullopt;
}

/// Total mapping from Universal Dependencies UPOS strings onto the coarse
/// tagset. Unknown strings land in OTHER, as do PUNCT, SYM, X and INTJ.
inline CoarseTag map_to_coarse(std::string_view upos) {
    if (upos == "NOUN" || upos == "PROPN") return CoarseTag::NOUN;
    if (upos == "VERB" || upos == "AUX") return CoarseTag::VERB;
    if (upos == "ADJ") return CoarseTag::ADJ;
    if (upos == "ADV") return CoarseTag::ADV;
    if (upos == "PRON") return CoarseTag::PRON;
    if (upos == "DET") return CoarseTag::DET;
    if (upos == "ADP") return CoarseTag::ADP;
    if (upos == "CCONJ" || upos == "SCONJ" || upos == "CONJ") return CoarseTag::CONJ;
    if (upos == "NUM") return CoarseTag::NUM;
    if (upos == "PART") return CoarseTag::PART;
    return CoarseTag::OTHER;
}

/// UPOS string that round-trips through map_to_coarse; used by the synthetic
/// corpus writer.
inline std::string_view tag_to_upos(CoarseTag t) {
    switch (t) {
        case CoarseTag::CONJ: return "CCONJ";
        case CoarseTag::OTHER: return "X";
        default: return tag_name(t);
    }
}

}  // namespace stylo
