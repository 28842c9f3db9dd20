#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "brd/error.hpp"
#include "brd/preprocess.hpp"

namespace brd {

namespace {

// Keep in sync with data/stop_pos_lexicon.tsv.
constexpr std::string_view kBundledLexicon =
    "# tag\tword\n"
    "pronoun\tআমি\n"
    "pronoun\tতুমি\n"
    "pronoun\tতোমার\n"
    "pronoun\tতার\n"
    "pronoun\tআমার\n"
    "pronoun\tআমরা\n"
    "pronoun\tআপনি\n"
    "pronoun\tআপনার\n"
    "pronoun\tসে\n"
    "pronoun\tতারা\n"
    "pronoun\tতুই\n"
    "pronoun\tতোর\n"
    "conjunction\tএবং\n"
    "conjunction\tও\n"
    "conjunction\tআর\n"
    "conjunction\tকিন্তু\n"
    "conjunction\tঅথবা\n"
    "conjunction\tবা\n"
    "interjection\tহায়\n"
    "interjection\tওহ\n"
    "interjection\tওঃ\n"
    "interjection\tওমা\n"
    "interjection\tআহা\n"
    "interjection\tছি\n"
    "preposition\tদ্বারা\n"
    "preposition\tদিয়ে\n"
    "preposition\tতবে\n"
    "preposition\tথেকে\n"
    "preposition\tসাথে\n"
    "noun\tরহিম\n"
    "noun\tকরিম\n";

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::string_view to_string(PosTag tag) noexcept {
  switch (tag) {
    case PosTag::Pronoun: return "pronoun";
    case PosTag::Conjunction: return "conjunction";
    case PosTag::Interjection: return "interjection";
    case PosTag::Preposition: return "preposition";
    case PosTag::Noun: return "noun";
  }
  return "noun";
}

std::optional<PosTag> parse_pos_tag(std::string_view s) noexcept {
  std::string v = trim(s);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (PosTag t : {PosTag::Pronoun, PosTag::Conjunction, PosTag::Interjection, PosTag::Preposition,
                   PosTag::Noun}) {
    if (v == to_string(t)) return t;
  }
  return std::nullopt;
}

const std::set<PosTag>& default_drop_tags() {
  static const std::set<PosTag> tags = {PosTag::Pronoun, PosTag::Conjunction,
                                        PosTag::Interjection, PosTag::Preposition};
  return tags;
}

void StopPosLexicon::add(PosTag tag, std::string word) {
  auto [it, inserted] = tags_.emplace(std::move(word), tag);
  if (!inserted && it->second != tag) {
    throw Error(ErrorKind::Config, "lexicon word '" + it->first + "' listed as both " +
                                       std::string(to_string(it->second)) + " and " +
                                       std::string(to_string(tag)));
  }
}

std::optional<PosTag> StopPosLexicon::tag_of(std::string_view token) const {
  if (auto it = tags_.find(token); it != tags_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::string> StopPosLexicon::words(PosTag tag) const {
  std::vector<std::string> out;
  for (const auto& [word, t] : tags_) {
    if (t == tag) out.push_back(word);
  }
  return out;
}

StopPosLexicon StopPosLexicon::parse(std::string_view contents) {
  StopPosLexicon lex;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorKind::Config, "lexicon line " + std::to_string(line_no) + ": expected tag<TAB>word");
    }
    const auto tag = parse_pos_tag(line.substr(0, tab));
    if (!tag) {
      throw Error(ErrorKind::Config, "lexicon line " + std::to_string(line_no) + ": unknown tag '" +
                                         std::string(line.substr(0, tab)) + "'");
    }
    std::string word = trim(line.substr(tab + 1));
    if (word.empty()) {
      throw Error(ErrorKind::Config, "lexicon line " + std::to_string(line_no) + ": empty word");
    }
    lex.add(*tag, std::move(word));
  }
  return lex;
}

StopPosLexicon StopPosLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const StopPosLexicon& StopPosLexicon::bundled() {
  static const StopPosLexicon lex = parse(kBundledLexicon);
  return lex;
}

}  // namespace brd
