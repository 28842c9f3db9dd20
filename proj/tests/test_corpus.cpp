#include <doctest.h>

#include <set>

#include "brd/corpus.hpp"
#include "brd/error.hpp"
#include "support.hpp"

using namespace brd;

TEST_CASE("label mapping") {
  CHECK(to_binary_label(RacismType::Ideological) == BinaryLabel::Racism);
  CHECK(to_binary_label(RacismType::Representational) == BinaryLabel::Racism);
  CHECK(to_binary_label(RacismType::Discursive) == BinaryLabel::Racism);
  CHECK(to_binary_label(RacismType::Normal) == BinaryLabel::NonRacism);
  CHECK(class_index(BinaryLabel::Racism) == 1);
  CHECK(parse_racism_type("Ideological") == RacismType::Ideological);
  CHECK(parse_racism_type("NORMAL") == RacismType::Normal);
  CHECK_FALSE(try_parse_racism_type("other").has_value());
  CHECK_THROWS_AS(parse_racism_type("other"), Error);
}

TEST_CASE("parse dataset") {
  SUBCASE("quoted fields") {
    auto d = parse_dataset("text,label\n\"a, \"\"b\"\"\nc\",normal\nplain,discursive\n");
    REQUIRE(d.records.size() == 2);
    CHECK(d.records[0].text == "a, \"b\"\nc");
    CHECK(d.records[0].id == 0);
    CHECK(d.records[1].binary_label == BinaryLabel::Racism);
  }
  SUBCASE("id column honoured") {
    auto d = parse_dataset("id,text,label\n7,x,normal\n3,y,ideological\n");
    CHECK(d.records[0].id == 7);
    CHECK(d.records[1].id == 3);
  }
  SUBCASE("bad label cites the line") {
    try {
      parse_dataset("text,label\nok,normal\nbad,other\n", "f.csv");
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Schema);
      CHECK(std::string(e.what()).find("f.csv:3") != std::string::npos);
    }
  }
  SUBCASE("bad header") { CHECK_THROWS_AS(parse_dataset("body,class\nx,normal\n"), Error); }
  SUBCASE("empty text") { CHECK_THROWS_AS(parse_dataset("text,label\n\" \",normal\n"), Error); }
  SUBCASE("duplicates counted") {
    auto d = parse_dataset("text,label\nx,normal\nx,normal\ny,normal\n");
    CHECK(d.records.size() == 3);
    CHECK(d.duplicate_texts == 1);
  }
  SUBCASE("unterminated quote") { CHECK_THROWS_AS(parse_dataset("text,label\n\"x,normal\n"), Error); }
}

TEST_CASE("write and reload dataset") {
  test::TempDir dir("corpus");
  std::vector<LabeledRecord> rows = {make_record(4, "comma, \"quote\"", RacismType::Ideological),
                                     make_record(9, "বাংলা", RacismType::Normal)};
  write_dataset(dir / "d.csv", rows);
  auto back = load_dataset(dir / "d.csv").records;
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == 4);
  CHECK(back[0].text == rows[0].text);
  CHECK(back[1].racism_type == RacismType::Normal);
  CHECK_THROWS_AS(load_dataset(dir / "missing.csv"), Error);
}

TEST_CASE("class distribution") {
  auto rows = test::synthetic_records({1974, 1062, 1905, 1214}, 1);
  auto d = class_distribution(rows);
  CHECK(d.total == 6155);
  CHECK(d.count(RacismType::Representational) == 1974);
  CHECK(d.count(RacismType::Normal) == 1214);
  CHECK(d.count(BinaryLabel::Racism) == 4941);
  CHECK(d.count(BinaryLabel::NonRacism) == 1214);
}

TEST_CASE("split") {
  CHECK(train_count(6155, 0.8) == 4924);
  CHECK(train_count(5, 0.5) == 3);
  auto rows = test::synthetic_records({1974, 1062, 1905, 1214}, 2);

  SUBCASE("sizes and proportions") {
    auto s = split_train_test(rows, 0.8, 42, true);
    CHECK(s.train.size() == 4924);
    CHECK(s.test.size() == 1231);
    auto tr = class_distribution(s.train);
    CHECK(std::abs(static_cast<double>(tr.count(BinaryLabel::Racism)) - 0.8 * 4941) <= 1.0);
    CHECK(std::abs(static_cast<double>(tr.count(BinaryLabel::NonRacism)) - 0.8 * 1214) <= 1.0);
  }
  SUBCASE("partition") {
    auto s = split_train_test(rows, 0.8, 42, true);
    std::set<std::size_t> ids;
    for (const auto& r : s.train) ids.insert(r.id);
    for (const auto& r : s.test) CHECK(ids.insert(r.id).second);
    CHECK(ids.size() == rows.size());
  }
  SUBCASE("deterministic per seed") {
    auto a = split_train_test(rows, 0.8, 5, true);
    auto b = split_train_test(rows, 0.8, 5, true);
    auto c = split_train_test(rows, 0.8, 6, true);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.test.size(); ++i) {
      same = same && a.test[i].id == b.test[i].id;
      differs = differs || a.test[i].id != c.test[i].id;
    }
    CHECK(same);
    CHECK(differs);
  }
  SUBCASE("unstratified keeps the total") {
    auto s = split_train_test(rows, 0.8, 42, false);
    CHECK(s.train.size() == 4924);
  }
  SUBCASE("degenerate class") {
    auto only = test::synthetic_records({10, 0, 0, 0}, 3);
    CHECK_THROWS_AS(split_train_test(only, 0.8, 42, true), Error);
  }
  SUBCASE("bad ratio") { CHECK_THROWS_AS(split_train_test(rows, 1.0, 42, true), Error); }
}

TEST_CASE("split manifest round trip") {
  test::TempDir dir("manifest");
  auto rows = test::synthetic_records({10, 10, 10, 10}, 4);
  auto s = split_train_test(rows, 0.75, 1, true);
  write_split_manifest(dir / "split.csv", s);
  auto m = read_split_manifest(dir / "split.csv");
  REQUIRE(m.train_ids.size() == s.train.size());
  REQUIRE(m.test_ids.size() == s.test.size());
  for (std::size_t i = 0; i < s.test.size(); ++i) CHECK(m.test_ids[i] == s.test[i].id);
}
