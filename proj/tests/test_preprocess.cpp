#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "brd/error.hpp"
#include "brd/preprocess.hpp"
#include "brd/random.hpp"
#include "support.hpp"
#include "brd/utf8.hpp"

using namespace brd;

namespace {

PreprocessConfig only(bool numbers, bool punct, bool emoji, bool pos) {
  PreprocessConfig c;
  c.remove_numbers = numbers;
  c.remove_punctuation = punct;
  c.remove_emoji = emoji;
  c.remove_pos = pos;
  return c;
}

// Pieces the random-string generator draws from.
const std::vector<std::string>& alphabet() {
  static const std::vector<std::string> a = {
      "a", "Z", "k", " ", " ", "  ", "\t", "1", "9", "০", "৭", "!", ".", ",", "?", "-", "\"", "।", "॥",
      "ক", "া", "্", "য", "ব", "😂", "🙏", "☀", "🇧", "🇩", "‍", "️", "আমি", "এবং", "হায়",
      "রহিম", "তার", " ", "\n"};
  return a;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_pieces = 24) {
  const auto& a = alphabet();
  std::string s;
  const auto n = bounded(rng, max_pieces + 1);
  for (std::uint64_t i = 0; i < n; ++i) s += a[bounded(rng, a.size())];
  return s;
}

std::map<char32_t, int> multiset(const std::string& s) {
  std::map<char32_t, int> m;
  for (char32_t c : utf8::decode(s)) {
    if (!is_space_cp(c)) ++m[c];
  }
  return m;
}

}  // namespace

TEST_CASE("number removal") {
  CHECK(remove_numbers("12Tar per sb rastay") == "Tar per sb rastay");
  CHECK(remove_numbers("no digits here") == "no digits here");
  CHECK(remove_numbers("a1b2c3") == "abc");
  CHECK(remove_numbers("১২তার") == "তার");
  CHECK(remove_numbers("৯৯ 42") == "");
}

TEST_CASE("punctuation removal") {
  CHECK(remove_punctuation("bokaram!!!!! dure giya mor......") == "bokaram dure giya mor");
  CHECK(remove_punctuation("plain words") == "plain words");
  CHECK(remove_punctuation("a,b;c!") == "a b c");
  CHECK(remove_punctuation("a,b;c!", false) == "abc");
  CHECK(remove_punctuation("মর......।") == "মর");
  CHECK(remove_punctuation("এক॥দুই") == "এক দুই");
}

TEST_CASE("emoji removal") {
  CHECK(remove_emoji("text 😂😂") == "text");
  CHECK(remove_emoji("text only") == "text only");
  CHECK(remove_emoji("😂 word") == "word");
  CHECK(remove_emoji("a👍🏽b") == "a b");
  CHECK(remove_emoji("👨‍👩‍👧 family") == "family");
  CHECK(remove_emoji("☀️ sun") == "sun");
  CHECK(remove_emoji("🇧🇩 flag") == "flag");
  SUBCASE("joiner inside a Bengali conjunct is deleted without splitting the word") {
    CHECK(remove_emoji("র‍্যাব") == "র্যাব");
  }
  SUBCASE("custom range") {
    PreprocessConfig c;
    c.emoji_ranges = {{U'x', U'x'}};
    CHECK(remove_emoji("axb 😂", c) == "a b 😂");
  }
}

TEST_CASE("stop POS removal") {
  StopPosLexicon lex;
  lex.add(PosTag::Conjunction, "ar");
  lex.add(PosTag::Pronoun, "ami");
  lex.add(PosTag::Noun, "rahim");
  CHECK(remove_stop_pos("x ar y", lex, {PosTag::Conjunction}) == "x y");
  CHECK(remove_stop_pos("x ar y", lex, {}) == "x ar y");
  std::size_t removed = 0;
  CHECK(remove_stop_pos("ami x ar y z", lex, default_drop_tags(), &removed) == "x y z");
  CHECK(removed == 2);
  CHECK(remove_stop_pos("rahim and ami", lex, default_drop_tags()) == "rahim and");
  CHECK(remove_stop_pos("rahim and ami", lex, {PosTag::Noun}) == "and ami");
  CHECK(remove_stop_pos("army arx", lex, {PosTag::Conjunction}) == "army arx");
}

TEST_CASE("lexicon") {
  SUBCASE("words are disjoint across tags") {
    StopPosLexicon lex;
    lex.add(PosTag::Noun, "w");
    lex.add(PosTag::Noun, "w");
    CHECK(lex.size() == 1);
    CHECK_THROWS_AS(lex.add(PosTag::Pronoun, "w"), Error);
  }
  SUBCASE("bundled lists") {
    const auto& b = StopPosLexicon::bundled();
    CHECK(b.tag_of("আমি") == PosTag::Pronoun);
    CHECK(b.tag_of("এবং") == PosTag::Conjunction);
    CHECK(b.tag_of("হায়") == PosTag::Interjection);
    CHECK(b.tag_of("দ্বারা") == PosTag::Preposition);
    CHECK(b.tag_of("রহিম") == PosTag::Noun);
    CHECK_FALSE(b.tag_of("খেলা").has_value());
  }
  SUBCASE("bundled list matches the shipped file") {
    const auto file = StopPosLexicon::load(test::data_dir() / "stop_pos_lexicon.tsv");
    const auto& b = StopPosLexicon::bundled();
    CHECK(file.size() == b.size());
    for (auto tag : {PosTag::Pronoun, PosTag::Conjunction, PosTag::Interjection, PosTag::Preposition, PosTag::Noun}) {
      CHECK(file.words(tag) == b.words(tag));
    }
  }
  SUBCASE("parse") {
    auto lex = StopPosLexicon::parse("# comment\n\npronoun\tx\nconjunction\ty\n");
    CHECK(lex.tag_of("x") == PosTag::Pronoun);
    CHECK_THROWS_AS(StopPosLexicon::parse("adverb\tz\n"), Error);
    CHECK_THROWS_AS(StopPosLexicon::parse("pronoun z\n"), Error);
  }
}

TEST_CASE("whitespace") {
  CHECK(normalize_whitespace("a  b ") == "a b");
  CHECK(normalize_whitespace("") == "");
  CHECK(normalize_whitespace("  ") == "");
  CHECK(normalize_whitespace("\ta\n b") == "a b");
}

TEST_CASE("clean") {
  CHECK(clean("12!! x").cleaned == "x");
  SUBCASE("already clean text is unchanged and all stages are listed") {
    auto c = clean("plain words");
    CHECK(c.cleaned == "plain words");
    CHECK(c.stages_applied == std::vector<std::string>{"numbers", "punctuation", "emoji", "pos", "whitespace"});
    CHECK(c.stages_changed.empty());
  }
  SUBCASE("only emoji and punctuation") {
    auto c = clean("😂!! ...🙏");
    CHECK(c.cleaned.empty());
    CHECK(c.empty());
  }
  SUBCASE("toggles") {
    auto c = clean("12 x 😂", only(true, true, false, true));
    CHECK(c.cleaned == "x 😂");
    CHECK(std::find(c.stages_applied.begin(), c.stages_applied.end(), "emoji") == c.stages_applied.end());
  }
  SUBCASE("POS counts") {
    auto c = clean("আমি এবং তুমি খেলা");
    CHECK(c.cleaned == "খেলা");
    CHECK(c.removed_token_count == 3);
  }
  SUBCASE("custom POS source") {
    PreprocessConfig cfg;
    auto lex = std::make_shared<StopPosLexicon>();
    lex->add(PosTag::Interjection, "oh");
    cfg.pos_source = lex;
    CHECK(clean("oh no আমি", cfg).cleaned == "no আমি");
  }
  SUBCASE("Bengali composite") {
    CHECK(clean("১২তার পর সব রাস্তায় 😂😂!!!!!").cleaned == "পর সব রাস্তায়");
  }
}

TEST_CASE("properties on random strings") {
  std::mt19937_64 rng(20240501);
  const PreprocessConfig full;
  const PreprocessConfig chars = only(true, true, true, false);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string s = random_text(rng);
    const std::string c = clean(s, full).cleaned;
    CAPTURE(s);
    // idempotence, per stage and overall
    REQUIRE(clean(c, full).cleaned == c);
    REQUIRE(remove_numbers(remove_numbers(s)) == remove_numbers(s));
    REQUIRE(remove_punctuation(remove_punctuation(s)) == remove_punctuation(s));
    REQUIRE(remove_emoji(remove_emoji(s)) == remove_emoji(s));
    // character stages commute
    const auto np = remove_punctuation(remove_numbers(s));
    REQUIRE(np == remove_numbers(remove_punctuation(s)));
    REQUIRE(remove_emoji(np) == remove_numbers(remove_emoji(remove_punctuation(s))));
    REQUIRE(remove_emoji(remove_numbers(s)) == remove_numbers(remove_emoji(s)));
    // no stray whitespace
    REQUIRE(c == normalize_whitespace(c));
    // nothing from the removed classes survives
    for (char32_t cp : utf8::decode(c)) {
      REQUIRE_FALSE(is_digit_cp(cp));
      REQUIRE_FALSE(is_punctuation_cp(cp));
      for (const auto& r : full.emoji_ranges) REQUIRE_FALSE(r.contains(cp));
      for (const auto& r : full.emoji_joiners) REQUIRE_FALSE(r.contains(cp));
    }
    // no introduction, length monotone
    auto before = multiset(s);
    for (const auto& [cp, n] : multiset(clean(s, chars).cleaned)) REQUIRE(n <= before[cp]);
    REQUIRE(c.size() <= s.size());
    REQUIRE(remove_numbers(s).size() <= s.size());
    REQUIRE(remove_punctuation(s).size() <= s.size());
    REQUIRE(remove_emoji(s).size() <= s.size());
  }
}
