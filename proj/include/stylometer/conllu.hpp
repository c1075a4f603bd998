#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/tagset.hpp"

namespace stylo {

/// Parse CoNLL-U text into (surface, coarse tag) pairs.
///
/// Standard 10-column tab-separated format. Only FORM (column 2) and UPOS
/// (column 4) are consumed; comment lines and blank sentence separators are
/// honored. Multiword-token ranges (ID "1-2") and empty nodes (ID "1.1")
/// are skipped, matching the usual treatment of the word-line stream.
inline std::vector<std::pair<std::string, CoarseTag>> parse_conllu(const std::string& text) {
    std::vector<std::pair<std::string, CoarseTag>> tokens;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;      // sentence separator
        if (line[0] == '#') continue;    // comment

        std::vector<std::string> cols;
        std::size_t field_start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                cols.push_back(line.substr(field_start, i - field_start));
                field_start = i + 1;
            }
        }
        if (cols.size() < 4)
            throw MalformedConllu(line_no, "expected at least 4 tab-separated columns, got " +
                                               std::to_string(cols.size()));
        const std::string& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;
        const std::string& form = cols[1];
        const std::string& upos = cols[3];
        if (form.empty()) throw MalformedConllu(line_no, "empty FORM column");
        if (upos.empty()) throw MalformedConllu(line_no, "empty UPOS column");
        tokens.emplace_back(form, map_to_coarse(upos));
    }
    return tokens;
}

inline std::vector<std::pair<std::string, CoarseTag>> load_conllu(const std::string& path) {
    return parse_conllu(read_file(path));
}

}  // namespace stylo
