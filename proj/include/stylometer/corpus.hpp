#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/conllu.hpp"
#include "stylometer/lexicon.hpp"
#include "stylometer/tagset.hpp"
#include "stylometer/text.hpp"

namespace stylo {

enum class EntryFormat { Conllu, RawText };

struct ManifestEntry {
    std::string path;    // as written in the manifest, used as the document id
    std::string author;
    std::string title;
    EntryFormat format = EntryFormat::Conllu;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    std::string base_dir;  // manifest location; relative entry paths resolve against it

    std::string resolve(const ManifestEntry& e) const {
        std::filesystem::path p(e.path);
        if (p.is_absolute() || base_dir.empty()) return e.path;
        return (std::filesystem::path(base_dir) / p).string();
    }
};

struct Token {
    std::string surface;
    CoarseTag tag;
};

struct Document {
    std::string id;      // manifest path
    std::string author;
    std::string title;
    std::vector<Token> tokens;
    std::size_t word_count = 0;  // tokens whose tag is not OTHER
};

struct SplitAssignment {
    std::set<std::size_t> train;
    std::set<std::size_t> validation;
    std::set<std::size_t> test;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Parse a manifest CSV (`path,author,title,format` header). Row numbers in
/// errors are 1-based and count the header.
inline Manifest parse_manifest(const std::string& text, const std::string& base_dir) {
    Manifest manifest;
    manifest.base_dir = base_dir;
    std::set<std::string> seen_paths;

    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) return manifest;

    std::string header = lines[0];
    if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header = header.substr(3);
    if (header != "path,author,title,format")
        throw MalformedManifest(1, "expected header path,author,title,format");

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int row = static_cast<int>(i) + 1;
        if (lines[i].empty()) continue;
        std::vector<std::string> fields;
        if (!csv_parse_line(lines[i], fields)) throw MalformedManifest(row, "unterminated quote");
        if (fields.size() != 4)
            throw MalformedManifest(row, "expected 4 fields, got " + std::to_string(fields.size()));
        ManifestEntry e;
        e.path = fields[0];
        e.author = fields[1];
        e.title = fields[2];
        if (e.path.empty()) throw MalformedManifest(row, "empty path");
        if (e.author.empty()) throw MalformedManifest(row, "empty author");
        if (e.title.empty()) throw MalformedManifest(row, "empty title");
        const std::string fmt = trim(fields[3]);
        if (fmt == "conllu") e.format = EntryFormat::Conllu;
        else if (fmt == "raw-text") e.format = EntryFormat::RawText;
        else throw MalformedManifest(row, "unknown format tag: " + fmt);
        if (!seen_paths.insert(e.path).second)
            throw MalformedManifest(row, "duplicate path: " + e.path);
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

inline Manifest load_manifest(const std::string& path) {
    return parse_manifest(read_file(path), std::filesystem::path(path).parent_path().string());
}

inline std::string manifest_to_csv(const Manifest& m) {
    std::ostringstream out;
    out << "path,author,title,format\n";
    for (const auto& e : m.entries) {
        out << csv_field(e.path) << ',' << csv_field(e.author) << ',' << csv_field(e.title) << ','
            << (e.format == EntryFormat::Conllu ? "conllu" : "raw-text") << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

inline std::size_t count_words(const std::vector<Token>& tokens) {
    std::size_t n = 0;
    for (const auto& t : tokens)
        if (t.tag != CoarseTag::OTHER) ++n;
    return n;
}

/// Load one manifest entry. CoNLL-U files go through parse_conllu; raw text
/// goes through the baseline tagger.
inline Document load_document(const Manifest& manifest, const ManifestEntry& entry,
                              const TagLexicon& lexicon = builtin_german_lexicon()) {
    Document doc;
    doc.id = entry.path;
    doc.author = entry.author;
    doc.title = entry.title;
    const std::string resolved = manifest.resolve(entry);
    std::vector<std::pair<std::string, CoarseTag>> tagged;
    if (entry.format == EntryFormat::Conllu) {
        tagged = load_conllu(resolved);
    } else {
        tagged = tag_raw_text(read_file(resolved), lexicon);
    }
    doc.tokens.reserve(tagged.size());
    for (auto& [surface, tag] : tagged) doc.tokens.push_back({std::move(surface), tag});
    doc.word_count = count_words(doc.tokens);
    return doc;
}

/// Punctuation removal and lowercasing. Tokens in the OTHER bucket (the
/// tagset's punctuation/catch-all class) are dropped; the rest are
/// lowercased. Documents below min_words come back as nullopt, which is an
/// exclusion, not an error.
inline std::optional<Document> preprocess(const Document& doc, std::size_t min_words = 1000) {
    Document out;
    out.id = doc.id;
    out.author = doc.author;
    out.title = doc.title;
    out.tokens.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) {
        if (t.tag == CoarseTag::OTHER) continue;
        out.tokens.push_back({lowercase(t.surface), t.tag});
    }
    out.word_count = out.tokens.size();
    if (out.word_count < min_words) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

/// Per-author stratified split.
///
/// Rounding rule: train takes floor(r_train * n) but at least one document;
/// the remainder goes test-first (capped at ceil(r_test * n)), then
/// validation (capped at ceil(r_val * n)), then overflows back to train.
/// This guarantees a test item for every author with enough works and keeps
/// every represented author present in train.
inline SplitAssignment split_dataset(const std::vector<Document>& docs, SplitRatios ratios,
                                     std::uint64_t seed) {
    if (docs.empty()) throw EmptyCorpus("split_dataset: no documents");
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw StyloError("split ratios must sum to 1, got " + format_full(sum));
    if (ratios.train <= 0.0 || ratios.validation < 0.0 || ratios.test < 0.0)
        throw StyloError("split ratios out of range");

    std::map<std::string, std::vector<std::size_t>> by_author;
    for (std::size_t i = 0; i < docs.size(); ++i) by_author[docs[i].author].push_back(i);

    SplitAssignment split;
    split.seed = seed;
    for (auto& [author, indices] : by_author) {
        Rng rng(mix_seed(seed, fnv1a(author)));
        shuffle(indices, rng);
        const std::size_t n = indices.size();
        std::size_t n_train = static_cast<std::size_t>(ratios.train * static_cast<double>(n));
        if (n_train == 0) n_train = 1;
        if (n_train > n) n_train = n;
        std::size_t remaining = n - n_train;
        const auto cap = [n](double r) {
            return static_cast<std::size_t>(std::ceil(r * static_cast<double>(n)));
        };
        const std::size_t n_test = std::min(remaining, cap(ratios.test));
        remaining -= n_test;
        const std::size_t n_val = std::min(remaining, cap(ratios.validation));
        remaining -= n_val;
        n_train += remaining;  // overflow back to train

        std::size_t k = 0;
        for (std::size_t c = 0; c < n_train; ++c) split.train.insert(indices[k++]);
        for (std::size_t c = 0; c < n_test; ++c) split.test.insert(indices[k++]);
        for (std::size_t c = 0; c < n_val; ++c) split.validation.insert(indices[k++]);
    }
    return split;
}

/// Canonical serialization used by the determinism checks: one
/// `doc_id,subset` line per document in corpus order.
inline std::string split_to_csv(const SplitAssignment& split, const std::vector<Document>& docs) {
    std::ostringstream out;
    out << "doc_id,subset\n";
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const char* subset = split.train.count(i) ? "train"
                             : split.validation.count(i) ? "validation"
                             : split.test.count(i) ? "test"
                                                   : "unassigned";
        out << csv_field(docs[i].id) << ',' << subset << '\n';
    }
    return out.str();
}

inline std::set<std::string> select_frequent_authors(const std::vector<Document>& docs,
                                                     std::size_t min_works = 5) {
    std::map<std::string, std::size_t> counts;
    for (const auto& d : docs) ++counts[d.author];
    std::set<std::string> selected;
    for (const auto& [author, n] : counts)
        if (n >= min_works) selected.insert(author);
    return selected;
}

}  // namespace stylo
