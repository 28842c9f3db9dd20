#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace brd {

enum class PosTag : std::uint8_t { Pronoun, Conjunction, Interjection, Preposition, Noun };

std::string_view to_string(PosTag tag) noexcept;
std::optional<PosTag> parse_pos_tag(std::string_view s) noexcept;

/// Anything that can assign a stop-worthy part-of-speech tag to a whole token.
class PosSource {
 public:
  virtual ~PosSource() = default;
  virtual std::optional<PosTag> tag_of(std::string_view token) const = 0;
};

/// Exact-match word lists per tag. A word belongs to at most one tag.
class StopPosLexicon final : public PosSource {
 public:
  /// Throws Error(Config) if `word` is already listed under another tag.
  void add(PosTag tag, std::string word);
  std::optional<PosTag> tag_of(std::string_view token) const override;
  std::vector<std::string> words(PosTag tag) const;
  std::size_t size() const noexcept { return tags_.size(); }

  /// Bengali word lists: pronouns, conjunctions, interjections, prepositions and a
  /// couple of proper nouns.
  static const StopPosLexicon& bundled();
  /// Lines of `tag<TAB>word`; blank lines and `#` comments are skipped.
  static StopPosLexicon parse(std::string_view contents);
  static StopPosLexicon load(const std::filesystem::path& path);

 private:
  std::map<std::string, PosTag, std::less<>> tags_;
};

struct CodepointRange {
  char32_t first;
  char32_t last;  // inclusive
  bool contains(char32_t cp) const noexcept { return cp >= first && cp <= last; }
};

const std::set<PosTag>& default_drop_tags();

struct PreprocessConfig {
  bool remove_numbers = true;
  bool remove_punctuation = true;
  bool remove_emoji = true;
  bool remove_pos = true;
  std::set<PosTag> drop_tags = default_drop_tags();
  /// Pictographs; each removed run becomes a space.
  std::vector<CodepointRange> emoji_ranges = {
      {0x1F300, 0x1FAFF}, {0x2600, 0x27BF}, {0x1F1E6, 0x1F1FF}};
  /// Sequence glue (variation selector, zero-width joiner); deleted in place.
  std::vector<CodepointRange> emoji_joiners = {{0xFE0F, 0xFE0F}, {0x200D, 0x200D}};
  /// false deletes punctuation in place instead of leaving a space.
  bool punctuation_to_space = true;
  std::shared_ptr<const PosSource> pos_source;  // null -> bundled lexicon
};

struct CleanText {
  std::string original;
  std::string cleaned;
  std::vector<std::string> stages_applied;
  std::vector<std::string> stages_changed;  // stages that altered the text
  std::size_t removed_token_count = 0;  // whole tokens dropped by the POS stage

  bool empty() const noexcept { return cleaned.empty(); }
};

bool is_digit_cp(char32_t cp) noexcept;        // ASCII and Bengali digits
bool is_punctuation_cp(char32_t cp) noexcept;  // ASCII punctuation, danda, double danda
bool is_space_cp(char32_t cp) noexcept;

std::string normalize_whitespace(std::string_view text);
std::string remove_numbers(std::string_view text);
std::string remove_punctuation(std::string_view text, bool to_space = true);
std::string remove_emoji(std::string_view text, const PreprocessConfig& config = {});
std::string remove_stop_pos(std::string_view text, const PosSource& pos,
                            const std::set<PosTag>& drop_tags,
                            std::size_t* removed = nullptr);

/// numbers -> punctuation -> emoji -> POS -> whitespace, each when enabled.
CleanText clean(std::string_view text, const PreprocessConfig& config = {});

}  // namespace brd
