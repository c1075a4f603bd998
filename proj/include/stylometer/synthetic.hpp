#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/corpus.hpp"
#include "stylometer/tagset.hpp"

namespace stylo {

/// Markov-chain author model over the coarse tagset: documents are tag
/// sequences sampled from a row-stochastic transition matrix, written out
/// as CoNLL-U with placeholder surfaces.
struct SyntheticAuthorSpec {
    std::string author;
    std::array<double, kTagCount * kTagCount> transition{};  // row-major, rows sum to 1
    std::array<double, kTagCount> initial{};                 // sums to 1
    std::size_t docs = 12;
    std::size_t min_len = 2000;  // words per document, inclusive
    std::size_t max_len = 10000;

    double t(std::size_t i, std::size_t j) const { return transition[i * kTagCount + j]; }

    void validate() const {
        if (author.empty()) throw InvalidTransitionMatrix("author name empty");
        if (docs == 0 || min_len == 0 || min_len > max_len)
            throw InvalidTransitionMatrix(author + ": bad doc count or length range");
        for (std::size_t i = 0; i < kTagCount; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < kTagCount; ++j) {
                if (t(i, j) < 0.0)
                    throw InvalidTransitionMatrix(author + ": negative entry in row " +
                                                  std::to_string(i));
                sum += t(i, j);
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw InvalidTransitionMatrix(author + ": row " + std::to_string(i) +
                                              " sums to " + format_full(sum));
        }
        double isum = 0.0;
        for (double p : initial) {
            if (p < 0.0) throw InvalidTransitionMatrix(author + ": negative initial probability");
            isum += p;
        }
        if (std::abs(isum - 1.0) > 1e-9)
            throw InvalidTransitionMatrix(author + ": initial distribution sums to " +
                                          format_full(isum));
    }
};

/// Stationary distribution by power iteration; the oracle used by the
/// generator's convergence tests.
inline std::array<double, kTagCount> stationary_distribution(const SyntheticAuthorSpec& spec,
                                                             int iterations = 2000) {
    std::array<double, kTagCount> pi = spec.initial;
    std::array<double, kTagCount> next{};
    for (int it = 0; it < iterations; ++it) {
        next.fill(0.0);
        for (std::size_t i = 0; i < kTagCount; ++i) {
            if (pi[i] == 0.0) continue;
            for (std::size_t j = 0; j < kTagCount; ++j) next[j] += pi[i] * spec.t(i, j);
        }
        pi = next;
    }
    return pi;
}

/// Mean over rows of the total-variation distance between two authors'
/// transition matrices.
inline double mean_row_tv(const SyntheticAuthorSpec& a, const SyntheticAuthorSpec& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < kTagCount; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < kTagCount; ++j) row += std::abs(a.t(i, j) - b.t(i, j));
        total += 0.5 * row;
    }
    return total / static_cast<double>(kTagCount);
}

inline std::vector<CoarseTag> sample_tag_sequence(const SyntheticAuthorSpec& spec,
                                                  std::size_t length, Rng& rng) {
    std::vector<CoarseTag> tags;
    tags.reserve(length);
    std::vector<double> weights(spec.initial.begin(), spec.initial.end());
    std::size_t state = sample_discrete(weights, rng);
    tags.push_back(static_cast<CoarseTag>(state));
    std::vector<double> row(kTagCount);
    for (std::size_t k = 1; k < length; ++k) {
        for (std::size_t j = 0; j < kTagCount; ++j) row[j] = spec.t(state, j);
        state = sample_discrete(row, rng);
        tags.push_back(static_cast<CoarseTag>(state));
    }
    return tags;
}

namespace detail {

/// Placeholder surface per tag; lowercase so preprocessing is a no-op on it.
inline std::string surface_for(CoarseTag t, std::size_t index) {
    std::string s(tag_name(t));
    for (char& c : s) c = static_cast<char>(c - 'A' + 'a');
    return s + std::to_string(index % 7);
}

}  // namespace detail

/// Render a tag sequence as CoNLL-U, chunked into sentences of 12-18 words
/// with a closing PUNCT token each. The punctuation is dropped again by
/// preprocessing, so the extracted features see the unbroken chain.
inline std::string render_conllu(const std::vector<CoarseTag>& tags, Rng& rng) {
    std::ostringstream out;
    std::size_t pos = 0;
    std::size_t sent = 0;
    while (pos < tags.size()) {
        const std::size_t len = std::min<std::size_t>(12 + uniform_below(rng, 7), tags.size() - pos);
        ++sent;
        out << "# sent_id = " << sent << '\n';
        std::size_t id = 0;
        for (std::size_t k = 0; k < len; ++k, ++pos) {
            const CoarseTag t = tags[pos];
            out << ++id << '\t' << detail::surface_for(t, pos) << "\t_\t" << tag_to_upos(t)
                << "\t_\t_\t0\t_\t_\t_\n";
        }
        out << ++id << "\t.\t_\tPUNCT\t_\t_\t0\t_\t_\t_\n\n";
    }
    return out.str();
}

/// Write one document per (author, index) under out_dir and a manifest.csv
/// describing them. Deterministic per seed: each document draws from its own
/// stream keyed by (seed, author, index).
inline Manifest generate_synthetic_corpus(const std::vector<SyntheticAuthorSpec>& specs,
                                          std::uint64_t seed, const std::string& out_dir) {
    if (specs.size() < 2) throw StyloError("generate_synthetic_corpus: need at least 2 authors");
    for (const auto& s : specs) s.validate();

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    Manifest manifest;
    manifest.base_dir = out_dir;
    for (const auto& spec : specs) {
        std::string slug = spec.author;
        for (char& c : slug) {
            if (c == ' ' || c == '/') c = '_';
            else c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        fs::create_directories(fs::path(out_dir) / slug);
        for (std::size_t d = 0; d < spec.docs; ++d) {
            Rng rng(mix_seed(mix_seed(seed, fnv1a(spec.author)), d));
            const std::size_t len =
                spec.min_len + uniform_below(rng, spec.max_len - spec.min_len + 1);
            const auto tags = sample_tag_sequence(spec, len, rng);
            char name[32];
            std::snprintf(name, sizeof name, "doc_%02zu.conllu", d + 1);
            const std::string rel = slug + "/" + name;
            write_file((fs::path(out_dir) / rel).string(), render_conllu(tags, rng));
            ManifestEntry entry;
            entry.path = rel;
            entry.author = spec.author;
            entry.title = spec.author + " Work " + std::to_string(d + 1);
            entry.format = EntryFormat::Conllu;
            manifest.entries.push_back(std::move(entry));
        }
    }
    write_file((fs::path(out_dir) / "manifest.csv").string(), manifest_to_csv(manifest));
    return manifest;
}

// ---------------------------------------------------------------------------
// Built-in benchmark: 8 authors in 4 pairs. Both members of a pair share the
// same stationary tag distribution exactly (so unigram features cannot tell
// them apart at any document length) but walk the tagset with different step
// sizes, which separates their bigram structure. Across pairs the stationary
// distributions themselves differ. Every transition matrix is a blend of a
// rank-one jump to the stationary distribution and a Metropolis ring walk,
// both of which leave the stationary distribution invariant.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::size_t kActiveTags = 10;  // all classes except OTHER

inline std::array<double, kTagCount * kTagCount> blended_walk(
    const std::array<double, kActiveTags>& pi, std::size_t step, double jump_weight) {
    std::array<double, kTagCount * kTagCount> T{};
    for (std::size_t i = 0; i < kActiveTags; ++i) {
        // Metropolis over the ring of active tags, symmetric +-step proposal.
        std::array<double, kActiveTags> m{};
        const std::size_t fwd = (i + step) % kActiveTags;
        const std::size_t bwd = (i + kActiveTags - step % kActiveTags) % kActiveTags;
        if (fwd != i) m[fwd] += 0.5 * std::min(1.0, pi[fwd] / pi[i]);
        if (bwd != i && bwd != fwd) m[bwd] += 0.5 * std::min(1.0, pi[bwd] / pi[i]);
        double off = 0.0;
        for (std::size_t j = 0; j < kActiveTags; ++j) off += m[j];
        m[i] += 1.0 - off;
        for (std::size_t j = 0; j < kActiveTags; ++j)
            T[i * kTagCount + j] = jump_weight * pi[j] + (1.0 - jump_weight) * m[j];
    }
    T[static_cast<std::size_t>(CoarseTag::OTHER) * kTagCount +
      static_cast<std::size_t>(CoarseTag::OTHER)] = 1.0;  // unused self-loop row
    return T;
}

}  // namespace detail

/// The 8-author corpus used by the end-to-end classification benchmark:
/// minimum pairwise mean-row TV distance 0.20, 12 documents per author,
/// 2000-10000 words each.
inline std::vector<SyntheticAuthorSpec> benchmark_author_specs() {
    using Profile = std::array<double, detail::kActiveTags>;
    // Stationary tag profiles: nominal, verbal, descriptive, connective.
    const std::array<Profile, 4> profiles = {{
        {0.34, 0.10, 0.09, 0.05, 0.06, 0.17, 0.10, 0.04, 0.02, 0.03},
        {0.10, 0.30, 0.04, 0.13, 0.13, 0.07, 0.07, 0.08, 0.02, 0.06},
        {0.16, 0.08, 0.26, 0.16, 0.04, 0.09, 0.07, 0.04, 0.05, 0.05},
        {0.11, 0.08, 0.05, 0.06, 0.20, 0.08, 0.14, 0.16, 0.04, 0.08},
    }};
    const std::array<std::array<std::size_t, 2>, 4> steps = {{{1, 3}, {2, 4}, {1, 3}, {2, 4}}};
    const double jump_weight = 0.45;

    std::vector<SyntheticAuthorSpec> specs;
    const char* names[8] = {"Author-A", "Author-B", "Author-C", "Author-D",
                            "Author-E", "Author-F", "Author-G", "Author-H"};
    for (std::size_t group = 0; group < 4; ++group) {
        for (std::size_t member = 0; member < 2; ++member) {
            SyntheticAuthorSpec spec;
            spec.author = names[group * 2 + member];
            spec.transition = detail::blended_walk(profiles[group], steps[group][member], jump_weight);
            for (std::size_t j = 0; j < detail::kActiveTags; ++j) spec.initial[j] = profiles[group][j];
            spec.docs = 12;
            spec.min_len = 2000;
            spec.max_len = 10000;
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

}  // namespace stylo
