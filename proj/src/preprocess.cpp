#include "brd/preprocess.hpp"

#include <algorithm>

#include "brd/utf8.hpp"

namespace brd {

bool is_digit_cp(char32_t cp) noexcept {
  return (cp >= U'0' && cp <= U'9') || (cp >= 0x09E6 && cp <= 0x09EF);
}

bool is_punctuation_cp(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  return cp == 0x0964 || cp == 0x0965;
}

bool is_space_cp(char32_t cp) noexcept {
  return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0;
}

namespace {

bool in_any(const std::vector<CodepointRange>& ranges, char32_t cp) {
  return std::any_of(ranges.begin(), ranges.end(), [cp](const auto& r) { return r.contains(cp); });
}

enum class Action { Keep, Delete, Space };

/// Maps every code point independently, then collapses whitespace. Because the
/// per-character maps of the different stages touch disjoint sets, the stages
/// commute.
template <typename Classify>
std::string filter(std::string_view text, Classify classify) {
  const std::u32string in = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : in) {
    switch (classify(cp)) {
      case Action::Keep: utf8::append(out, cp); break;
      case Action::Space: out.push_back(' '); break;
      case Action::Delete: break;
    }
  }
  return normalize_whitespace(out);
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  const std::u32string in = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : in) {
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, cp);
  }
  return out;
}

std::string remove_numbers(std::string_view text) {
  return filter(text, [](char32_t cp) { return is_digit_cp(cp) ? Action::Delete : Action::Keep; });
}

std::string remove_punctuation(std::string_view text, bool to_space) {
  const Action hit = to_space ? Action::Space : Action::Delete;
  return filter(text, [hit](char32_t cp) { return is_punctuation_cp(cp) ? hit : Action::Keep; });
}

std::string remove_emoji(std::string_view text, const PreprocessConfig& config) {
  return filter(text, [&config](char32_t cp) {
    if (in_any(config.emoji_ranges, cp)) return Action::Space;
    if (in_any(config.emoji_joiners, cp)) return Action::Delete;
    return Action::Keep;
  });
}

std::string remove_stop_pos(std::string_view text, const PosSource& pos,
                            const std::set<PosTag>& drop_tags, std::size_t* removed) {
  const std::string normalized = normalize_whitespace(text);
  std::string out;
  std::size_t dropped = 0;
  for (std::string_view tok : tokens(normalized)) {
    if (!drop_tags.empty()) {
      if (auto tag = pos.tag_of(tok); tag && drop_tags.contains(*tag)) {
        ++dropped;
        continue;
      }
    }
    if (!out.empty()) out.push_back(' ');
    out.append(tok);
  }
  if (removed) *removed = dropped;
  return out;
}

CleanText clean(std::string_view text, const PreprocessConfig& config) {
  CleanText result;
  result.original = std::string(text);
  std::string current(text);
  const auto run = [&](const char* name, std::string next) {
    if (next != current) result.stages_changed.emplace_back(name);
    result.stages_applied.emplace_back(name);
    current = std::move(next);
  };
  if (config.remove_numbers) run("numbers", remove_numbers(current));
  if (config.remove_punctuation) run("punctuation", remove_punctuation(current, config.punctuation_to_space));
  if (config.remove_emoji) run("emoji", remove_emoji(current, config));
  if (config.remove_pos) {
    const PosSource& pos = config.pos_source ? *config.pos_source : StopPosLexicon::bundled();
    run("pos", remove_stop_pos(current, pos, config.drop_tags, &result.removed_token_count));
  }
  run("whitespace", normalize_whitespace(current));
  result.cleaned = std::move(current);
  return result;
}

}  // namespace brd
