#pragma once

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/corpus.hpp"

namespace test_helpers {

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path = base / ("stylometer_test_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline stylo::Document make_doc(const std::string& id, const std::string& author,
                                const std::vector<stylo::CoarseTag>& tags) {
    stylo::Document doc;
    doc.id = id;
    doc.author = author;
    doc.title = id;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        doc.tokens.push_back({"w" + std::to_string(i), tags[i]});
    }
    doc.word_count = stylo::count_words(doc.tokens);
    return doc;
}

inline std::vector<stylo::CoarseTag> random_tags(std::size_t n, stylo::Rng& rng) {
    std::vector<stylo::CoarseTag> tags(n);
    for (auto& t : tags)
        t = static_cast<stylo::CoarseTag>(stylo::uniform_below(rng, stylo::kTagCount));
    return tags;
}

/// Minimal well-formedness check for the SVG subset the emitters produce:
/// balanced tags, quoted attributes, one root element, no stray '<' or '&'.
inline bool xml_well_formed(const std::string& text) {
    std::size_t i = 0;
    std::vector<std::string> stack;
    bool seen_root = false;
    bool in_prolog = true;

    auto fail = [](const char*) { return false; };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '<') {
            if (i + 1 >= text.size()) return fail("eof after <");
            if (text[i + 1] == '?') {
                if (!in_prolog) return fail("prolog not at start");
                const auto end = text.find("?>", i);
                if (end == std::string::npos) return fail("unterminated prolog");
                i = end + 2;
                continue;
            }
            in_prolog = false;
            const bool closing = text[i + 1] == '/';
            std::size_t j = i + (closing ? 2 : 1);
            std::string name;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '-' || text[j] == '_' || text[j] == ':'))
                name += text[j++];
            if (name.empty()) return fail("empty tag name");
            // scan to '>' validating quotes
            bool self_closing = false;
            while (j < text.size() && text[j] != '>') {
                if (text[j] == '"') {
                    j = text.find('"', j + 1);
                    if (j == std::string::npos) return fail("unterminated attribute");
                }
                if (text[j] == '/' && j + 1 < text.size() && text[j + 1] == '>') {
                    self_closing = true;
                }
                ++j;
            }
            if (j >= text.size()) return fail("unterminated tag");
            if (closing) {
                if (stack.empty() || stack.back() != name) return fail("mismatched close");
                stack.pop_back();
            } else if (!self_closing) {
                if (stack.empty() && seen_root) return fail("second root");
                stack.push_back(name);
                seen_root = true;
            } else if (stack.empty()) {
                if (seen_root) return fail("second root");
                seen_root = true;
            }
            i = j + 1;
        } else if (c == '&') {
            static const char* entities[] = {"&amp;", "&lt;", "&gt;", "&quot;", "&apos;"};
            bool ok = false;
            for (const char* e : entities) {
                if (text.compare(i, std::string(e).size(), e) == 0) {
                    i += std::string(e).size();
                    ok = true;
                    break;
                }
            }
            if (!ok) return fail("bare ampersand");
        } else if (c == '>') {
            return fail("bare >");
        } else {
            ++i;
        }
    }
    return stack.empty() && seen_root;
}

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace test_helpers
