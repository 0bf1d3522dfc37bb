#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "oniontext/preprocess.hpp"
#include "oniontext/rng.hpp"
#include "oniontext/text_util.hpp"
#include "test_support.hpp"

using namespace oniontext;

namespace {

const PreprocessResources& res() {
    static PreprocessResources resources = PreprocessResources::load(test::preprocess_dir());
    return resources;
}

bool lower_alpha_only(const std::string& token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

// Noisy seeded text: words, digits, urls, markup, punctuation, a few
// multi-byte sequences.
std::string random_noisy_text(Rng& rng) {
    static const char* pieces[] = {
        "buy",      "CHEAP",     "pills4u", " ",        "\t",        "$50",
        "http://market.onion/x", "www.shop.com",        "<b>",       "</b>",
        "<script>alert(1)</script>", "you're",          "don't",     "guns",
        "shipping", "grams",     "5g",      "quality!", "(escrow)",  "bitcoin",
        "пример",   "漢字",       "...",     "a",        "I'm",       "They'll",
        "item-42",  "co.caine",  "\n",      "worldwide", "STEALTH",  "packs",
    };
    std::string text;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) {
        text += pieces[rng.below(std::size(pieces))];
        if (rng.unit() < 0.7) text += ' ';
    }
    return text;
}

}  // namespace

TEST_CASE("clean_markup removes residual tags and URLs") {
    CHECK(clean_markup("visit http://abc.onion now") == "visit  now");
    CHECK(clean_markup("no urls here") == "no urls here");
    CHECK(clean_markup("<b>cash</b> www.shop.com") == "cash ");
    CHECK(clean_markup("ftp://files.example/x done") == " done");
    CHECK(clean_markup("<!-- note -->kept") == "kept");
    CHECK(clean_markup("plain.onion.link gone") == " gone");
}

TEST_CASE("normalize_tokens expands contractions then strips specials") {
    CHECK(normalize_tokens("you're buying", res()) == "you are buying");
    CHECK(normalize_tokens("5g for $50!", res()) == "for");
    CHECK(normalize_tokens("pure cocaine", res()) == "pure cocaine");
    CHECK(normalize_tokens("You're early", res()) == "You are early");
    CHECK(normalize_tokens("item-42 co.caine", res()) == "cocaine");
}

TEST_CASE("filter_and_lemmatize drops stopwords and lemmatizes") {
    CHECK(filter_and_lemmatize("You are buying Cocaine", res()) ==
          std::vector<std::string>{"buy", "cocaine"});
    CHECK(filter_and_lemmatize("", res()).empty());
    CHECK(filter_and_lemmatize("guns guns guns", res()) ==
          std::vector<std::string>{"gun", "gun", "gun"});
}

TEST_CASE("lemmatizer handles dictionary and suffix cases") {
    CHECK(lemmatize("bought", res()) == "buy");
    CHECK(lemmatize("buying", res()) == "buy");
    CHECK(lemmatize("making", res()) == "make");
    CHECK(lemmatize("supplies", res()) == "supply");
    CHECK(lemmatize("tested", res()) == "test");
    CHECK(lemmatize("services", res()) == "service");
    CHECK(lemmatize("class", res()) == "class");
    CHECK(lemmatize("gun", res()) == "gun");
    CHECK(lemmatize("children", res()) == "child");
}

TEST_CASE("preprocess runs the full six-step pipeline") {
    CHECK(preprocess("<p>You're buying 5g of pure cocaine for $50! "
                     "Visit http://ex.onion now</p>",
                     res()) ==
          std::vector<std::string>{"buy", "pure", "cocaine", "visit"});
    CHECK(preprocess("", res()).empty());
}

TEST_CASE("preprocess output is a fixed point") {
    const char* inputs[] = {
        "<p>You're buying 5g of pure cocaine for $50! Visit http://ex.onion now</p>",
        "Guns and ammo, shipped worldwide!",
        "the they them those  guns",
    };
    for (const char* input : inputs) {
        auto first = preprocess(input, res());
        auto second = preprocess(join(first, " "), res());
        CHECK(second == first);
    }
}

TEST_CASE("preprocess properties hold on seeded random inputs") {
    Rng rng(20260808);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text = random_noisy_text(rng);
        auto tokens = preprocess(text, res());
        for (const auto& token : tokens) {
            CAPTURE(text);
            CAPTURE(token);
            CHECK(lower_alpha_only(token));
            CHECK_FALSE(res().stopword_set.contains(token));
        }
        auto again = preprocess(join(tokens, " "), res());
        CHECK(again == tokens);
    }
}

TEST_CASE("documents in non-Latin scripts reduce to empty token lists") {
    CHECK(preprocess("пример текста без латиницы", res()).empty());
    CHECK(preprocess("漢字 のみ", res()).empty());
}

TEST_CASE("stopword table is the pinned research list") {
    // 179 lines; the alphabetic normalization merges one apostrophe form.
    CHECK(res().stopword_set.size() == 178);
    CHECK(res().stopword_set.contains("the"));
    CHECK(res().stopword_set.contains("dont"));
    CHECK_FALSE(res().stopword_set.contains("cocaine"));
}

TEST_CASE("contraction table is well-formed") {
    CHECK(res().contraction_table.size() >= 100);
    for (const auto& [key, expansion] : res().contraction_table) {
        CHECK(key.find('\'') != std::string::npos);
        CHECK(expansion.find('\'') == std::string::npos);
    }
}
