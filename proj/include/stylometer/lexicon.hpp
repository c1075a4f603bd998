#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/tagset.hpp"
#include "stylometer/text.hpp"

namespace stylo {

// Deterministic baseline tagger: word lookup, then suffix rules
// (longest-suffix-first), then a default tag. It substitutes for a real
// statistical tagger when no CoNLL-U annotation is available.
class TagLexicon {
  public:
    TagLexicon() = default;

    void add_word(const std::string& word, CoarseTag tag) { words_[lowercase(word)] = tag; }

    void add_suffix(const std::string& suffix, CoarseTag tag) {
        suffixes_.emplace_back(lowercase(suffix), tag);
        sort_suffixes();
    }

    void set_default(CoarseTag tag) { default_ = tag; }
    CoarseTag default_tag() const { return default_; }
    std::size_t word_count() const { return words_.size(); }
    const std::vector<std::pair<std::string, CoarseTag>>& suffix_rules() const { return suffixes_; }

    /// Lookup one token. Punctuation-only tokens are OTHER regardless of
    /// lexicon content.
    CoarseTag tag(const std::string& surface) const {
        if (is_punct_token(surface)) return CoarseTag::OTHER;
        const std::string key = lowercase(surface);
        if (auto it = words_.find(key); it != words_.end()) return it->second;
        for (const auto& [suffix, t] : suffixes_) {
            if (key.size() >= suffix.size() &&
                key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0) {
                return t;
            }
        }
        return default_;
    }

    /// Parse the lexicon file format: `word,tag` rows, `#suffix:<sfx>,<tag>`
    /// and `#default:<tag>` directives; other `#` lines are comments.
    static TagLexicon parse(const std::string& text) {
        TagLexicon lex;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string line = trim(eol == std::string::npos ? text.substr(pos)
                                                             : text.substr(pos, eol - pos));
            pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
            ++line_no;
            if (line.empty()) continue;
            if (line[0] == '#') {
                if (line.rfind("#suffix:", 0) == 0) {
                    const std::string body = line.substr(8);
                    const std::size_t comma = body.find(',');
                    if (comma == std::string::npos)
                        throw MalformedLexicon(line_no, "expected #suffix:<sfx>,<tag>");
                    auto t = tag_from_name(trim(body.substr(comma + 1)));
                    if (!t) throw MalformedLexicon(line_no, "unknown tag in suffix rule");
                    lex.suffixes_.emplace_back(lowercase(body.substr(0, comma)), *t);
                } else if (line.rfind("#default:", 0) == 0) {
                    auto t = tag_from_name(trim(line.substr(9)));
                    if (!t) throw MalformedLexicon(line_no, "unknown default tag");
                    lex.default_ = *t;
                }
                continue;
            }
            std::vector<std::string> fields;
            if (!csv_parse_line(line, fields) || fields.size() != 2)
                throw MalformedLexicon(line_no, "expected word,tag");
            auto t = tag_from_name(trim(fields[1]));
            if (!t) throw MalformedLexicon(line_no, "unknown tag " + fields[1]);
            lex.words_[lowercase(trim(fields[0]))] = *t;
        }
        lex.sort_suffixes();
        return lex;
    }

    static TagLexicon load(const std::string& path) { return parse(read_file(path)); }

  private:
    void sort_suffixes() {
        // Longest suffix wins; file order breaks ties.
        std::stable_sort(suffixes_.begin(), suffixes_.end(),
                         [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    }

    std::map<std::string, CoarseTag> words_;
    std::vector<std::pair<std::string, CoarseTag>> suffixes_;
    CoarseTag default_ = CoarseTag::OTHER;
};

/// Tag a pre-tokenized surface sequence.
inline std::vector<CoarseTag> tag_tokens(const std::vector<std::string>& surfaces,
                                         const TagLexicon& lexicon) {
    std::vector<CoarseTag> tags;
    tags.reserve(surfaces.size());
    for (const auto& s : surfaces) tags.push_back(lexicon.tag(s));
    return tags;
}

/// Tokenize and tag raw text.
inline std::vector<std::pair<std::string, CoarseTag>> tag_raw_text(const std::string& text,
                                                                   const TagLexicon& lexicon) {
    std::vector<std::pair<std::string, CoarseTag>> out;
    for (auto& surface : tokenize(text)) {
        CoarseTag t = lexicon.tag(surface);
        out.emplace_back(std::move(surface), t);
    }
    return out;
}

/// Compact built-in German lexicon: closed-class function words, Germanic
/// derivational suffixes, digit suffixes for numerals, default NOUN.
/// Accuracy is secondary; CoNLL-U input is the canonical path.
inline const TagLexicon& builtin_german_lexicon() {
    static const TagLexicon lex = [] {
        TagLexicon l;
        l.set_default(CoarseTag::NOUN);
        const char* det[] = {"der", "die", "das", "den", "dem", "des", "ein", "eine", "einen",
                             "einem", "einer", "eines", "kein", "keine", "keinen", "keinem",
                             "keiner", "jeder", "jede", "jedes", "alle", "allen", "aller",
                             "beide", "beiden", "viele", "vielen", "mancher", "manche",
                             "solche", "solcher", "mein", "meine", "dein", "deine", "sein",
                             "seine", "seinen", "seiner", "ihr", "ihre", "ihren", "ihrer",
                             "unser", "unsere", "euer", "eure"};
        const char* conj[] = {"und", "oder", "aber", "denn", "sondern", "dass", "weil", "wenn",
                              "als", "ob", "obwohl", "falls", "bevor", "nachdem", "damit",
                              "sodass", "sobald", "solange", "sowie", "indem", "wobei"};
        const char* pron[] = {"ich", "du", "er", "sie", "es", "wir", "mir", "mich", "dir",
                              "dich", "ihm", "ihn", "uns", "euch", "ihnen", "sich", "man",
                              "wer", "wem", "wen", "was", "dieser", "diese", "dieses", "jener",
                              "jene", "jenes", "welcher", "welche", "welches", "etwas",
                              "nichts", "jemand", "niemand", "alles"};
        const char* adp[] = {"in", "an", "auf", "aus", "bei", "mit", "nach", "seit", "von",
                             "zu", "über", "unter", "vor", "hinter", "neben", "zwischen",
                             "durch", "für", "gegen", "ohne", "um", "bis", "trotz", "wegen",
                             "statt", "während", "ab", "gegenüber", "entlang", "innerhalb",
                             "außerhalb", "im", "am", "beim", "zum", "zur", "vom", "ins",
                             "aufs", "übers"};
        const char* adv[] = {"auch", "nur", "noch", "schon", "sehr", "immer", "wieder", "hier",
                             "dort", "da", "dann", "so", "heute", "morgen", "gestern", "oft",
                             "bald", "jetzt", "nun", "doch", "bereits", "fast", "ganz",
                             "gerade", "eben", "vielleicht", "wohl", "dazu", "daher", "darum",
                             "deshalb", "trotzdem", "dennoch", "allerdings", "jedoch", "nie",
                             "niemals", "oben", "unten", "draußen", "drinnen", "überall"};
        const char* verb[] = {"ist", "war", "sind", "waren", "bin", "bist", "seid", "sei",
                              "wäre", "wären", "gewesen", "hat", "hatte", "haben", "hatten",
                              "habe", "hast", "habt", "hätte", "hätten", "wird", "wurde",
                              "werden", "wurden", "werde", "wirst", "würde", "würden",
                              "worden", "kann", "konnte", "können", "konnten", "könnte",
                              "muss", "musste", "müssen", "mussten", "müsste", "soll",
                              "sollte", "sollen", "sollten", "will", "wollte", "wollen",
                              "wollten", "mag", "mochte", "möchte", "mögen", "darf", "durfte",
                              "dürfen", "lässt", "ließ", "geht", "ging", "kommt", "kam",
                              "sagt", "sagte", "macht", "machte", "sieht", "sah", "steht",
                              "stand", "gibt", "gab", "tut", "tat", "denkt", "dachte",
                              "weiß", "wusste", "findet", "fand", "bleibt", "blieb", "heißt",
                              "hieß", "scheint", "schien", "lag", "liegt", "saß", "sitzt"};
        const char* part[] = {"nicht", "ja", "nein", "mal", "halt", "denn", "etwa", "bloß"};
        const char* num[] = {"null", "eins", "zwei", "drei", "vier", "fünf", "sechs", "sieben",
                             "acht", "neun", "zehn", "elf", "zwölf", "zwanzig", "dreißig",
                             "hundert", "tausend", "million"};
        for (auto w : det) l.add_word(w, CoarseTag::DET);
        for (auto w : conj) l.add_word(w, CoarseTag::CONJ);
        for (auto w : pron) l.add_word(w, CoarseTag::PRON);
        for (auto w : adp) l.add_word(w, CoarseTag::ADP);
        for (auto w : adv) l.add_word(w, CoarseTag::ADV);
        for (auto w : verb) l.add_word(w, CoarseTag::VERB);
        for (auto w : part) l.add_word(w, CoarseTag::PART);
        for (auto w : num) l.add_word(w, CoarseTag::NUM);
        // "denn" appears as CONJ above and PART in the particle list; the
        // later insertion wins in add_word, so pin the CONJ reading back.
        l.add_word("denn", CoarseTag::CONJ);

        const std::pair<const char*, CoarseTag> sfx[] = {
            {"ung", CoarseTag::NOUN},    {"heit", CoarseTag::NOUN},  {"keit", CoarseTag::NOUN},
            {"schaft", CoarseTag::NOUN}, {"chen", CoarseTag::NOUN},  {"lein", CoarseTag::NOUN},
            {"tum", CoarseTag::NOUN},    {"nis", CoarseTag::NOUN},   {"lich", CoarseTag::ADJ},
            {"isch", CoarseTag::ADJ},    {"ig", CoarseTag::ADJ},     {"bar", CoarseTag::ADJ},
            {"sam", CoarseTag::ADJ},     {"haft", CoarseTag::ADJ},   {"los", CoarseTag::ADJ},
            {"voll", CoarseTag::ADJ},    {"ieren", CoarseTag::VERB}, {"eln", CoarseTag::VERB},
            {"ern", CoarseTag::VERB},    {"en", CoarseTag::VERB},    {"te", CoarseTag::VERB},
            {"st", CoarseTag::VERB},     {"weise", CoarseTag::ADV},
        };
        for (const auto& [s, t] : sfx) l.add_suffix(s, t);
        for (char d = '0'; d <= '9'; ++d) l.add_suffix(std::string(1, d), CoarseTag::NUM);
        return l;
    }();
    return lex;
}

}  // namespace stylo
