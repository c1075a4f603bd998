#include <catch2/catch_amalgamated.hpp>

#include "stylometer/tagset.hpp"

#include "helpers.hpp"
#include "stylometer/common.hpp"

using namespace stylo;

TEST_CASE("map_to_coarse follows the fixed mapping table", "[tagset]") {
    CHECK(map_to_coarse("NOUN") == CoarseTag::NOUN);
    CHECK(map_to_coarse("PROPN") == CoarseTag::NOUN);
    CHECK(map_to_coarse("VERB") == CoarseTag::VERB);
    CHECK(map_to_coarse("AUX") == CoarseTag::VERB);
    CHECK(map_to_coarse("ADJ") == CoarseTag::ADJ);
    CHECK(map_to_coarse("ADV") == CoarseTag::ADV);
    CHECK(map_to_coarse("PRON") == CoarseTag::PRON);
    CHECK(map_to_coarse("DET") == CoarseTag::DET);
    CHECK(map_to_coarse("ADP") == CoarseTag::ADP);
    CHECK(map_to_coarse("CCONJ") == CoarseTag::CONJ);
    CHECK(map_to_coarse("SCONJ") == CoarseTag::CONJ);
    CHECK(map_to_coarse("CONJ") == CoarseTag::CONJ);
    CHECK(map_to_coarse("NUM") == CoarseTag::NUM);
    CHECK(map_to_coarse("PART") == CoarseTag::PART);
    CHECK(map_to_coarse("INTJ") == CoarseTag::OTHER);
    CHECK(map_to_coarse("SYM") == CoarseTag::OTHER);
    CHECK(map_to_coarse("X") == CoarseTag::OTHER);
    CHECK(map_to_coarse("PUNCT") == CoarseTag::OTHER);
    CHECK(map_to_coarse("ZZZ") == CoarseTag::OTHER);
}

TEST_CASE("map_to_coarse is total over arbitrary strings", "[tagset]") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const std::size_t len = uniform_below(rng, 12);
        for (std::size_t i = 0; i < len; ++i)
            s += static_cast<char>(uniform_below(rng, 256));
        const CoarseTag t = map_to_coarse(s);
        CHECK(tag_index(t) >= 0);
        CHECK(tag_index(t) < kTagCount);
    }
}

TEST_CASE("tagset has 11 stable distinct names", "[tagset]") {
    REQUIRE(kTagCount == 11);
    for (int i = 0; i < kTagCount; ++i) {
        const auto t = static_cast<CoarseTag>(i);
        CHECK(tag_index(t) == i);
        const auto round = tag_from_name(tag_name(t));
        REQUIRE(round.has_value());
        CHECK(*round == t);
    }
    CHECK_FALSE(tag_from_name("noun").has_value());
    CHECK_FALSE(tag_from_name("").has_value());
}

TEST_CASE("tag_to_upos round-trips through map_to_coarse", "[tagset]") {
    for (int i = 0; i < kTagCount; ++i) {
        const auto t = static_cast<CoarseTag>(i);
        CHECK(map_to_coarse(tag_to_upos(t)) == t);
    }
}
