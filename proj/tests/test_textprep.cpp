#include <doctest.h>

#include <random>

#include "rankdiag/textprep.hpp"

using namespace rankdiag;

namespace {

std::vector<std::string> norms(std::string_view text) { return analyze_terms(text); }

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
    return out;
}

}  // namespace

TEST_CASE("analyze splits on non-alphanumerics and lowercases") {
    CHECK(norms("The cabinet, consists.") == std::vector<std::string>{"the", "cabinet", "consists"});
    CHECK(norms("").empty());
    CHECK(norms("BM25-ranker") == std::vector<std::string>{"bm25", "ranker"});
    CHECK(norms("u.s. population 1,200") == std::vector<std::string>{"u", "s", "population", "1", "200"});
    CHECK(norms("   \t\n ").empty());
}

TEST_CASE("no stemming, no stopwords") {
    CHECK(norms("the running runners ran") == std::vector<std::string>{"the", "running", "runners", "ran"});
}

TEST_CASE("token offsets cover the surface form") {
    const std::string text = "Hello, World! 42x";
    const auto toks = analyze(text);
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].surface == "Hello");
    CHECK(toks[0].begin == 0);
    CHECK(toks[0].end == 5);
    CHECK(toks[1].surface == "World");
    CHECK(toks[1].normalized == "world");
    CHECK(toks[2].surface == "42x");
    for (const auto& t : toks) CHECK(text.substr(t.begin, t.end - t.begin) == t.surface);
}

TEST_CASE("unicode letters and digits") {
    // Café, Straße, ÉCOLE, Greek, Cyrillic, Arabic-Indic digits, CJK.
    CHECK(norms("Café Straße") == std::vector<std::string>{"café", "straße"});
    CHECK(norms("ÉCOLE") == std::vector<std::string>{"école"});
    CHECK(norms("ΑΘΗΝΑ Москва") == std::vector<std::string>{"αθηνα", "москва"});
    CHECK(norms("٣٤ 東京") == std::vector<std::string>{"٣٤", "東京"});
    // Em dash and curly quotes separate.
    CHECK(norms("a—b “c”") == std::vector<std::string>{"a", "b", "c"});
    CHECK(unicode::is_alnum(U'ß'));
    CHECK_FALSE(unicode::is_alnum(U'—'));
    CHECK(unicode::to_lower(U'Ω') == U'ω');
}

TEST_CASE("malformed utf-8 bytes separate tokens") {
    const std::string text = std::string("ab") + "\xFF" + "cd" + "\xC3";
    CHECK(norms(text) == std::vector<std::string>{"ab", "cd"});
}

TEST_CASE("mask token recognition is opt-in") {
    CHECK(norms("[MASK] cat") == std::vector<std::string>{"mask", "cat"});
    const Analyzer masking(Analyzer::Options{.recognize_mask_token = true});
    const auto toks = masking.analyze("[MASK] cat[MASK]");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].is_mask());
    CHECK(toks[1].normalized == "cat");
    CHECK(toks[2].is_mask());
}

TEST_CASE("property: idempotence on random text") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pieces = {"Foo", "bar", "BAZ", "42", ",", ".", " ", "-", "\xC3\x89t\xC3\xA9",
                                             "\xCE\xA3", "\t", "x1y2", "!!", "\xE2\x80\x94", "\xF0\x9F\x98\x80"};
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 30);
    for (int iter = 0; iter < 500; ++iter) {
        std::string text;
        for (auto n = len(rng); n > 0; --n) text += pieces[pick(rng)];
        const auto first = norms(text);
        CHECK(norms(join(first)) == first);
        const auto toks = analyze(text);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            CHECK_FALSE(toks[i].normalized.empty());
            CHECK(toks[i].normalized.find(' ') == std::string::npos);
            CHECK(toks[i].end <= text.size());
            if (i > 0) CHECK(toks[i].begin > toks[i - 1].end);
        }
    }
}
