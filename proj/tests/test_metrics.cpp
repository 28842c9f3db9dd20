#include <doctest.h>

#include <random>
#include <regex>

#include "brd/error.hpp"
#include "brd/metrics.hpp"
#include "brd/random.hpp"
#include "support.hpp"

using namespace brd;

namespace {

ConfusionMatrix cm_of(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  ConfusionMatrix m;
  m.counts = {{{a, b}, {c, d}}};
  return m;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("confusion matrix") {
  const std::vector<std::uint8_t> t = {1, 1, 0}, p = {1, 0, 0};
  CHECK(confusion_matrix(t, p) == cm_of(1, 0, 1, 1));
  CHECK(confusion_matrix(t, t) == cm_of(1, 0, 0, 2));
  const std::vector<std::uint8_t> inv = {0, 0, 1};
  CHECK(confusion_matrix(t, inv) == cm_of(0, 1, 2, 0));
  const std::vector<BinaryLabel> bt = {BinaryLabel::Racism}, bp = {BinaryLabel::NonRacism};
  CHECK(confusion_matrix(bt, bp) == cm_of(0, 0, 1, 0));

  const std::vector<std::uint8_t> shorter = {1};
  CHECK_THROWS_AS(confusion_matrix(t, shorter), Error);
  CHECK_THROWS_AS(confusion_matrix(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), Error);
  const std::vector<std::uint8_t> three = {1, 2, 0};
  CHECK_THROWS_AS(confusion_matrix(t, three), Error);
}

TEST_CASE("per-class metrics") {
  const auto cm = cm_of(4, 1, 2, 3);
  const auto m1 = precision_recall_f1(cm, BinaryLabel::Racism);
  CHECK(m1.precision == doctest::Approx(0.75));
  CHECK(m1.recall == doctest::Approx(0.6));
  CHECK(m1.f1 == doctest::Approx(2.0 / 3.0));
  const auto m0 = precision_recall_f1(cm, BinaryLabel::NonRacism);
  CHECK(m0.precision == doctest::Approx(4.0 / 6.0));
  CHECK(m0.recall == doctest::Approx(0.8));
  CHECK(accuracy(cm) == doctest::Approx(0.7));

  const auto diag = cm_of(5, 0, 0, 7);
  const auto d1 = precision_recall_f1(diag, BinaryLabel::Racism);
  CHECK(d1.precision == 1.0);
  CHECK(d1.recall == 1.0);
  CHECK(d1.f1 == 1.0);
  CHECK(accuracy(diag) == 1.0);
  CHECK(accuracy(cm_of(0, 3, 4, 0)) == 0.0);
  CHECK(accuracy(ConfusionMatrix{}) == 0.0);

  SUBCASE("zero denominators") {
    const auto none_predicted = precision_recall_f1(cm_of(5, 0, 3, 0), BinaryLabel::Racism);
    CHECK(none_predicted.precision == 0.0);
    CHECK(none_predicted.precision_undefined);
    CHECK_FALSE(none_predicted.recall_undefined);
    CHECK(none_predicted.f1_undefined);
    const auto none_true = precision_recall_f1(cm_of(5, 2, 0, 0), BinaryLabel::Racism);
    CHECK(none_true.recall_undefined);
    CHECK(none_true.precision == 0.0);
    CHECK_FALSE(none_true.precision_undefined);
  }
}

TEST_CASE("metric properties on random data") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + bounded(rng, 60);
    std::vector<std::uint8_t> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<std::uint8_t>(bounded(rng, 2));
      p[i] = static_cast<std::uint8_t>(bounded(rng, 2));
    }
    const auto cm = confusion_matrix(t, p);
    REQUIRE(cm.total() == n);
    REQUIRE(accuracy(cm) == static_cast<double>(cm.at(0, 0) + cm.at(1, 1)) / n);
    // Swapping class roles swaps the per-class metrics.
    std::vector<std::uint8_t> tf(n), pf(n);
    for (std::size_t i = 0; i < n; ++i) {
      tf[i] = 1 - t[i];
      pf[i] = 1 - p[i];
    }
    const auto flipped = confusion_matrix(tf, pf);
    for (auto cls : {BinaryLabel::NonRacism, BinaryLabel::Racism}) {
      const auto other = cls == BinaryLabel::Racism ? BinaryLabel::NonRacism : BinaryLabel::Racism;
      const auto a = precision_recall_f1(cm, cls), b = precision_recall_f1(flipped, other);
      REQUIRE(a.precision == b.precision);
      REQUIRE(a.recall == b.recall);
      REQUIRE(a.f1 == b.f1);
      if (a.precision + a.recall > 0) {
        REQUIRE(a.f1 >= std::min(a.precision, a.recall) - 1e-15);
        REQUIRE(a.f1 <= std::max(a.precision, a.recall) + 1e-15);
      }
    }
  }
}

TEST_CASE("report file round trip") {
  auto r = make_report("Bi-LSTM", "stub-768", cm_of(4, 1, 2, 3), {{"epochs", "10"}, {"lr", "0.0001"}});
  CHECK(r.accuracy == doctest::Approx(0.7));
  CHECK(r.per_class[1].precision == doctest::Approx(0.75));
  const auto text = format_report(r);
  CHECK(text.find("rows = true class") != std::string::npos);
  const auto back = parse_report(text);
  CHECK(back.model_name == r.model_name);
  CHECK(back.embedding_name == r.embedding_name);
  CHECK(back.confusion == r.confusion);
  CHECK(back.accuracy == r.accuracy);
  CHECK(back.per_class[1].f1 == r.per_class[1].f1);
  CHECK(back.config_echo == r.config_echo);

  test::TempDir dir("report");
  write_report(r, dir / "r.txt");
  CHECK(read_report(dir / "r.txt").per_class[0].recall == r.per_class[0].recall);
  CHECK_THROWS_AS(parse_report("model = x\n"), Error);
  CHECK_THROWS_AS(read_report(dir / "none.txt"), Error);
}

TEST_CASE("combined table") {
  SUBCASE("one report gives two class rows sharing one accuracy cell") {
    const auto r = make_report("Bi-RNN", "E", cm_of(4, 1, 2, 3));
    const auto rows = table_rows({r});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].cls == 1);
    CHECK(rows[1].cls == 0);
    CHECK(rows[0].first_in_model);
    CHECK_FALSE(rows[1].first_in_model);
    const auto text = format_table({r});
    CHECK(count(text, "70.00") == 1);
  }
  SUBCASE("3 embeddings x 4 models") {
    std::vector<MetricsReport> reports;
    for (const char* e : {"BanglaBERT", "Bangla-Bert-Base", "SahajBERT"}) {
      for (const char* m : {"Bi-RNN", "Bi-LSTM", "MCNN-LSTM", "Ensemble"}) reports.push_back(make_report(m, e, cm_of(4, 1, 2, 3)));
    }
    // Interleave the input; grouping must follow first appearance per embedding.
    std::swap(reports[1], reports[5]);
    const auto rows = table_rows(reports);
    REQUIRE(rows.size() == 24);
    CHECK(rows[0].embedding == "BanglaBERT");
    CHECK(rows[7].embedding == "BanglaBERT");
    CHECK(rows[8].embedding == "Bangla-Bert-Base");
    int firsts = 0;
    for (const auto& row : rows) firsts += row.first_in_embedding;
    CHECK(firsts == 3);
    const auto text = format_table(reports);
    CHECK(count(text, "SahajBERT") == 1);
    const auto tsv = format_table_tsv(reports);
    CHECK(count(tsv, "\n") == 25);
  }
  SUBCASE("reference row layout") {
    MetricsReport r;
    r.model_name = "Ensemble";
    r.embedding_name = "SahajBERT";
    r.per_class[1] = {0.83, 0.94, 0.88};
    r.per_class[0] = {0.91, 0.72, 0.80};
    r.accuracy = 0.8794;
    const auto text = format_table({r});
    CHECK(std::regex_search(text, std::regex(R"(Ensemble\s*\|\s*1\s*\|\s*0\.83\s*\|\s*0\.94\s*\|\s*0\.88\s*\|\s*87\.94)")));
  }
  SUBCASE("undefined metrics are marked") {
    const auto r = make_report("Bi-RNN", "E", cm_of(5, 0, 3, 0));
    const auto text = format_table({r});
    CHECK(text.find("0.00*") != std::string::npos);
    CHECK(text.find("zero denominator") != std::string::npos);
  }
}

TEST_CASE("plots") {
  test::TempDir dir("plots");
  std::vector<EpochStats> h(10);
  for (int i = 0; i < 10; ++i) h[i] = {1.0 / (i + 1), 0.5 + i * 0.05, 1.2 / (i + 1), 0.5 + i * 0.04};
  render_history_plot(h, true, "Bi-RNN", dir / "h.svg");
  const auto svg = test::slurp(dir / "h.svg");
  CHECK(svg.find("data-epochs=\"10\"") != std::string::npos);
  CHECK(svg.find(">10<") != std::string::npos);
  CHECK(svg.find("val") != std::string::npos);

  render_confusion_heatmap(cm_of(40, 3, 5, 52), "Ensemble", dir / "cm.svg");
  const auto cm = test::slurp(dir / "cm.svg");
  CHECK(count(cm, "class=\"cell\"") == 4);
  CHECK(count(cm, "class=\"count\"") == 4);
  CHECK(cm.find(">52<") != std::string::npos);

  CHECK_THROWS_AS(render_confusion_heatmap(cm_of(1, 0, 0, 1), "x", dir / "cm.png"), Error);
  CHECK_THROWS_AS(render_history_plot({}, false, "x", dir / "e.svg"), Error);
  CHECK_THROWS_AS(render_confusion_heatmap(cm_of(1, 0, 0, 1), "x", dir / "no" / "such" / "cm.svg"), Error);
}
