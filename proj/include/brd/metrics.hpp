#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "brd/corpus.hpp"
#include "brd/models.hpp"

namespace brd {

/// counts[true][predicted]; class 0 = non-racism, class 1 = racism.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t at(int truth, int predicted) const { return counts[truth][predicted]; }
  std::size_t total() const noexcept {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Labels are 0 / 1. Throws Error(Input) on a length mismatch, empty input or a
/// label outside {0, 1}.
ConfusionMatrix confusion_matrix(std::span<const std::uint8_t> truth,
                                 std::span<const std::uint8_t> predicted);
ConfusionMatrix confusion_matrix(std::span<const BinaryLabel> truth,
                                 std::span<const BinaryLabel> predicted);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  // Set when the metric hit a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  bool any_undefined() const noexcept { return precision_undefined || recall_undefined || f1_undefined; }
};

ClassMetrics precision_recall_f1(const ConfusionMatrix& cm, BinaryLabel positive);
/// trace / total; 0 for an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct MetricsReport {
  std::string model_name;
  std::string embedding_name;
  std::array<ClassMetrics, 2> per_class{};  // indexed by class
  double accuracy = 0;
  ConfusionMatrix confusion;
  std::map<std::string, std::string> config_echo;
};

MetricsReport make_report(std::string model_name, std::string embedding_name,
                          const ConfusionMatrix& cm,
                          std::map<std::string, std::string> config_echo = {});

/// Human-diffable `key = value` text, full precision.
std::string format_report(const MetricsReport& report);
MetricsReport parse_report(const std::string& text);
void write_report(const MetricsReport& report, const std::filesystem::path& path);
MetricsReport read_report(const std::filesystem::path& path);

struct TableRow {
  std::string embedding;
  std::string model;
  int cls = 1;
  ClassMetrics metrics;
  double accuracy = 0;
  bool first_in_embedding = false;  // embedding cell printed on this row
  bool first_in_model = false;      // model and accuracy cells printed on this row
};

/// Rows grouped by embedding, then model (both in first-appearance order), class 1
/// before class 0, two rows per report.
std::vector<TableRow> table_rows(const std::vector<MetricsReport>& reports);
/// Plain-text table: P/R/F1 to two decimals, accuracy as a two-decimal percentage
/// shared by the two class rows. Zero-denominator metrics print as 0.00*.
std::string format_table(const std::vector<MetricsReport>& reports);
/// Tab-separated, one line per class row, full precision.
std::string format_table_tsv(const std::vector<MetricsReport>& reports);

/// SVG accuracy/loss curves over epochs (train and, when present, validation).
void render_history_plot(std::span<const EpochStats> history, bool has_validation,
                         const std::string& title, const std::filesystem::path& path);
/// SVG 2x2 heatmap, rows = true class, columns = predicted class, counts annotated.
void render_confusion_heatmap(const ConfusionMatrix& cm, const std::string& title,
                              const std::filesystem::path& path);

}  // namespace brd
