#include <catch2/catch_amalgamated.hpp>

#include "stylometer/synthetic.hpp"

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "stylometer/features.hpp"

using namespace stylo;
using test_helpers::TempDir;

namespace {

SyntheticAuthorSpec noun_absorbing_spec() {
    SyntheticAuthorSpec spec;
    spec.author = "Mono";
    for (std::size_t i = 0; i < kTagCount; ++i)
        spec.transition[i * kTagCount + static_cast<std::size_t>(CoarseTag::NOUN)] = 1.0;
    spec.initial[static_cast<std::size_t>(CoarseTag::NOUN)] = 1.0;
    spec.docs = 2;
    spec.min_len = 50;
    spec.max_len = 60;
    return spec;
}

}  // namespace

TEST_CASE("spec validation rejects broken matrices", "[synthetic]") {
    SyntheticAuthorSpec spec = noun_absorbing_spec();
    spec.transition[0] = 0.5;  // row 0 no longer sums to 1
    CHECK_THROWS_AS(spec.validate(), InvalidTransitionMatrix);

    SyntheticAuthorSpec neg = noun_absorbing_spec();
    neg.transition[0] = -0.25;
    neg.transition[static_cast<std::size_t>(CoarseTag::NOUN)] += 0.25;
    CHECK_THROWS_AS(neg.validate(), InvalidTransitionMatrix);

    SyntheticAuthorSpec bad_init = noun_absorbing_spec();
    bad_init.initial[0] = 0.5;
    CHECK_THROWS_AS(bad_init.validate(), InvalidTransitionMatrix);
}

TEST_CASE("an absorbing NOUN chain yields one-hot unigram vectors", "[synthetic]") {
    const auto spec = noun_absorbing_spec();
    Rng rng(3);
    const auto tags = sample_tag_sequence(spec, 500, rng);
    Document doc;
    doc.id = "mono";
    doc.author = spec.author;
    for (std::size_t i = 0; i < tags.size(); ++i) doc.tokens.push_back({"w", tags[i]});
    const auto v = unigram_vector(doc);
    CHECK(v[static_cast<std::size_t>(CoarseTag::NOUN)] == 1.0);
}

TEST_CASE("empirical bigrams converge to pi_i * T_ij", "[synthetic]") {
    const auto specs = benchmark_author_specs();
    const auto& spec = specs[0];
    const auto pi = stationary_distribution(spec);

    Rng rng(17);
    const auto tags = sample_tag_sequence(spec, 100000, rng);
    Document doc;
    doc.id = "big";
    doc.author = spec.author;
    for (std::size_t i = 0; i < tags.size(); ++i) doc.tokens.push_back({"w", tags[i]});
    const auto emp = bigram_matrix(doc);

    double max_err = 0.0;
    for (std::size_t i = 0; i < kTagCount; ++i)
        for (std::size_t j = 0; j < kTagCount; ++j)
            max_err = std::max(max_err, std::abs(emp.at(i, j) - pi[i] * spec.t(i, j)));
    CHECK(max_err < 0.01);
}

TEST_CASE("generation is byte-identical per seed", "[synthetic]") {
    auto specs = benchmark_author_specs();
    specs.resize(2);
    for (auto& s : specs) {
        s.docs = 2;
        s.min_len = 100;
        s.max_len = 200;
    }
    TempDir a, b, c;
    generate_synthetic_corpus(specs, 5, a.path.string());
    generate_synthetic_corpus(specs, 5, b.path.string());
    generate_synthetic_corpus(specs, 6, c.path.string());

    namespace fs = std::filesystem;
    std::vector<std::string> rels;
    for (const auto& e : fs::recursive_directory_iterator(a.path))
        if (e.is_regular_file()) rels.push_back(fs::relative(e.path(), a.path).string());
    std::sort(rels.begin(), rels.end());
    REQUIRE(rels.size() == 5);  // 2 docs x 2 authors + manifest
    bool any_seed_diff = false;
    for (const auto& rel : rels) {
        const auto fa = read_file((a.path / rel).string());
        CHECK(fa == read_file((b.path / rel).string()));
        if (fa != read_file((c.path / rel).string())) any_seed_diff = true;
    }
    CHECK(any_seed_diff);
}

TEST_CASE("generated corpus loads through the corpus module", "[synthetic]") {
    auto specs = benchmark_author_specs();
    specs.resize(2);
    for (auto& s : specs) {
        s.docs = 3;
        s.min_len = 120;
        s.max_len = 150;
    }
    TempDir dir;
    const auto manifest = generate_synthetic_corpus(specs, 9, dir.path.string());
    REQUIRE(manifest.entries.size() == 6);

    const auto loaded = load_manifest((dir.path / "manifest.csv").string());
    REQUIRE(loaded.entries.size() == 6);
    const auto doc = load_document(loaded, loaded.entries[0]);
    CHECK(doc.word_count >= 120);
    CHECK(doc.word_count <= 150);
    // sentence punctuation is present before preprocessing, gone after
    CHECK(doc.tokens.size() > doc.word_count);
    const auto clean = preprocess(doc, 1);
    REQUIRE(clean.has_value());
    CHECK(clean->tokens.size() == doc.word_count);
}

TEST_CASE("generate requires at least two authors", "[synthetic]") {
    TempDir dir;
    std::vector<SyntheticAuthorSpec> one = {noun_absorbing_spec()};
    CHECK_THROWS_AS(generate_synthetic_corpus(one, 1, dir.path.string()), StyloError);
}

TEST_CASE("benchmark authors are far apart in transition space", "[synthetic]") {
    const auto specs = benchmark_author_specs();
    REQUIRE(specs.size() == 8);
    for (const auto& s : specs) s.validate();
    for (std::size_t a = 0; a < specs.size(); ++a)
        for (std::size_t b = a + 1; b < specs.size(); ++b) {
            INFO("pair " << specs[a].author << " / " << specs[b].author);
            CHECK(mean_row_tv(specs[a], specs[b]) >= 0.15);
        }
}

TEST_CASE("benchmark pairs share their stationary distribution", "[synthetic]") {
    const auto specs = benchmark_author_specs();
    for (std::size_t pair = 0; pair < 4; ++pair) {
        const auto pa = stationary_distribution(specs[2 * pair]);
        const auto pb = stationary_distribution(specs[2 * pair + 1]);
        for (std::size_t i = 0; i < kTagCount; ++i)
            CHECK_THAT(pa[i], Catch::Matchers::WithinAbs(pb[i], 1e-9));
        // and the stationary distribution matches the configured initial one
        for (std::size_t i = 0; i < kTagCount; ++i)
            CHECK_THAT(pa[i], Catch::Matchers::WithinAbs(specs[2 * pair].initial[i], 1e-9));
    }
}
