#pragma once

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/corpus.hpp"
#include "stylometer/tagset.hpp"

namespace stylo {

/// Normalized tag frequencies; entries sum to 1 for a non-empty document.
struct UnigramVector {
    std::array<double, kTagCount> values{};
    std::string doc_id;

    double operator[](std::size_t i) const { return values[i]; }
};

/// Normalized consecutive-pair frequencies, entry (i,j) = P(tag_i followed
/// by tag_j); entries sum to 1 for a document with at least two tokens.
struct BigramMatrix {
    std::array<double, kTagCount * kTagCount> values{};  // row-major
    std::string doc_id;

    double at(std::size_t i, std::size_t j) const { return values[i * kTagCount + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * kTagCount + j]; }
};

struct FeatureRow {
    std::string doc_id;
    std::string author;
    UnigramVector unigram;
    BigramMatrix bigram;
};

struct FeatureTable {
    std::vector<FeatureRow> rows;
};

inline UnigramVector unigram_vector(const Document& doc) {
    if (doc.tokens.empty()) throw EmptyDocument("unigram_vector: " + doc.id + " has no tokens");
    UnigramVector v;
    v.doc_id = doc.id;
    for (const auto& t : doc.tokens) v.values[static_cast<std::size_t>(tag_index(t.tag))] += 1.0;
    const double n = static_cast<double>(doc.tokens.size());
    for (double& x : v.values) x /= n;
    return v;
}

inline BigramMatrix bigram_matrix(const Document& doc) {
    if (doc.tokens.size() < 2)
        throw TooShort("bigram_matrix: " + doc.id + " has fewer than 2 tokens");
    BigramMatrix m;
    m.doc_id = doc.id;
    for (std::size_t k = 0; k + 1 < doc.tokens.size(); ++k) {
        const auto i = static_cast<std::size_t>(tag_index(doc.tokens[k].tag));
        const auto j = static_cast<std::size_t>(tag_index(doc.tokens[k + 1].tag));
        m.at(i, j) += 1.0;
    }
    const double pairs = static_cast<double>(doc.tokens.size() - 1);
    for (double& x : m.values) x /= pairs;
    return m;
}

/// Row-major flattening, the layout fed to MDS and exported to CSV.
inline std::array<double, kTagCount * kTagCount> flatten(const BigramMatrix& m) {
    return m.values;
}

inline BigramMatrix unflatten(const std::array<double, kTagCount * kTagCount>& values) {
    BigramMatrix m;
    m.values = values;
    return m;
}

inline FeatureTable build_feature_table(const std::vector<Document>& docs) {
    FeatureTable table;
    table.rows.reserve(docs.size());
    for (const auto& doc : docs) {
        try {
            FeatureRow row;
            row.doc_id = doc.id;
            row.author = doc.author;
            row.unigram = unigram_vector(doc);
            row.bigram = bigram_matrix(doc);
            table.rows.push_back(std::move(row));
        } catch (const StyloError& e) {
            throw StyloError("feature extraction failed for " + doc.id + ": " + e.what());
        }
    }
    return table;
}

/// `doc_id,author,u0..u10,b0..b120`, full double precision.
inline std::string feature_table_to_csv(const FeatureTable& table) {
    std::ostringstream out;
    out << "doc_id,author";
    for (int i = 0; i < kTagCount; ++i) out << ",u" << i;
    for (int i = 0; i < kTagCount * kTagCount; ++i) out << ",b" << i;
    out << '\n';
    for (const auto& row : table.rows) {
        out << csv_field(row.doc_id) << ',' << csv_field(row.author);
        for (double v : row.unigram.values) out << ',' << format_full(v);
        for (double v : row.bigram.values) out << ',' << format_full(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace stylo
