#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "brd/error.hpp"
#include "brd/metrics.hpp"

namespace brd {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string pad(std::string s, std::size_t width, bool right) {
  // Width counts code points so Bengali embedding names line up.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps >= width) return s;
  const std::string fill(width - cps, ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

std::string format_report(const MetricsReport& r) {
  std::ostringstream out;
  out << "# evaluation report\n";
  out << "# confusion orientation: rows = true class, columns = predicted class; "
         "class 0 = non-racism, class 1 = racism\n";
  out << "model = " << r.model_name << '\n';
  out << "embedding = " << r.embedding_name << '\n';
  out << "samples = " << r.confusion.total() << '\n';
  out << "accuracy = " << full(r.accuracy) << '\n';
  for (int c = 0; c < 2; ++c) {
    const auto& m = r.per_class[c];
    const std::string k = "class" + std::to_string(c) + ".";
    out << k << "precision = " << full(m.precision) << '\n';
    out << k << "recall = " << full(m.recall) << '\n';
    out << k << "f1 = " << full(m.f1) << '\n';
    if (m.precision_undefined) out << k << "precision_undefined = true\n";
    if (m.recall_undefined) out << k << "recall_undefined = true\n";
    if (m.f1_undefined) out << k << "f1_undefined = true\n";
  }
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) {
      out << "confusion.true" << t << ".pred" << p << " = " << r.confusion.counts[t][p] << '\n';
    }
  }
  for (const auto& [k, v] : r.config_echo) out << "config." << k << " = " << v << '\n';
  return out.str();
}

MetricsReport parse_report(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Format, "report line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "model") {
        r.model_name = value;
      } else if (key == "embedding") {
        r.embedding_name = value;
      } else if (key == "accuracy") {
        r.accuracy = std::stod(value);
      } else if (key.rfind("class", 0) == 0 && key.size() > 7 && key[6] == '.') {
        const int c = key[5] - '0';
        if (c < 0 || c > 1) throw std::invalid_argument("class");
        auto& m = r.per_class[c];
        const std::string field = key.substr(7);
        if (field == "precision") m.precision = std::stod(value);
        else if (field == "recall") m.recall = std::stod(value);
        else if (field == "f1") m.f1 = std::stod(value);
        else if (field == "precision_undefined") m.precision_undefined = value == "true";
        else if (field == "recall_undefined") m.recall_undefined = value == "true";
        else if (field == "f1_undefined") m.f1_undefined = value == "true";
      } else if (key.rfind("confusion.true", 0) == 0 && key.size() == 21 && key.compare(15, 5, ".pred") == 0) {
        const int tr = key[14] - '0';
        const int pr = key[20] - '0';
        if (tr < 0 || tr > 1 || pr < 0 || pr > 1) throw std::invalid_argument("cell");
        r.confusion.counts[tr][pr] = std::stoull(value);
      } else if (key.rfind("config.", 0) == 0) {
        r.config_echo[key.substr(7)] = value;
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format, "report line " + std::to_string(line_no) + ": bad value for " + key);
    }
    seen.insert(key);
  }
  for (const char* key : {"model", "embedding", "accuracy", "confusion.true0.pred0", "confusion.true0.pred1",
                          "confusion.true1.pred0", "confusion.true1.pred1"}) {
    if (!seen.count(key)) throw Error(ErrorKind::Format, std::string("report has no '") + key + "' entry");
  }
  return r;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write report " + path.string());
  out << format_report(report);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

MetricsReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_report(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<TableRow> table_rows(const std::vector<MetricsReport>& reports) {
  std::vector<std::string> embeddings;
  for (const auto& r : reports) {
    if (std::find(embeddings.begin(), embeddings.end(), r.embedding_name) == embeddings.end()) {
      embeddings.push_back(r.embedding_name);
    }
  }
  std::vector<TableRow> rows;
  for (const auto& emb : embeddings) {
    bool first_emb = true;
    for (const auto& r : reports) {
      if (r.embedding_name != emb) continue;
      for (int cls : {1, 0}) {
        TableRow row;
        row.embedding = emb;
        row.model = r.model_name;
        row.cls = cls;
        row.metrics = r.per_class[cls];
        row.accuracy = r.accuracy;
        row.first_in_embedding = first_emb && cls == 1;
        row.first_in_model = cls == 1;
        rows.push_back(std::move(row));
      }
      first_emb = false;
    }
  }
  return rows;
}

std::string format_table(const std::vector<MetricsReport>& reports) {
  const auto rows = table_rows(reports);
  std::size_t emb_w = 10, model_w = 9;
  for (const auto& r : rows) {
    emb_w = std::max(emb_w, r.embedding.size());
    model_w = std::max(model_w, r.model.size());
  }
  const auto metric = [](double v, bool undefined) { return fixed2(v) + (undefined ? "*" : " "); };
  const auto rule = [&](char c) {
    return std::string(emb_w + 2, c) + "+" + std::string(model_w + 2, c) + "+-------+-------+-------+-------+--------\n";
  };

  std::ostringstream out;
  out << ' ' << pad("Embedding", emb_w, false) << " | " << pad("Model", model_w, false)
      << " | Class |   P   |   R   |  F1   | Acc(%)\n";
  out << rule('=');
  bool any_undefined = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0 && r.first_in_embedding) out << rule('=');
    else if (i > 0 && r.first_in_model) {
      out << std::string(emb_w + 2, ' ') << "+" << std::string(model_w + 2, '-')
          << "+-------+-------+-------+-------+--------\n";
    }
    any_undefined = any_undefined || r.metrics.any_undefined();
    out << ' ' << pad(r.first_in_embedding ? r.embedding : "", emb_w, false) << " | "
        << pad(r.first_in_model ? r.model : "", model_w, false) << " |   " << r.cls << "   | "
        << metric(r.metrics.precision, r.metrics.precision_undefined) << " | "
        << metric(r.metrics.recall, r.metrics.recall_undefined) << " | "
        << metric(r.metrics.f1, r.metrics.f1_undefined) << " | "
        << (r.first_in_model ? pad(fixed2(100.0 * r.accuracy), 6, true) : "") << '\n';
  }
  out << rule('=');
  out << "Class 0 = non-racism, class 1 = racism.\n";
  if (any_undefined) out << "* zero denominator; reported as 0.\n";
  return out.str();
}

std::string format_table_tsv(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "embedding\tmodel\tclass\tprecision\trecall\tf1\taccuracy\n";
  for (const auto& r : table_rows(reports)) {
    out << r.embedding << '\t' << r.model << '\t' << r.cls << '\t' << full(r.metrics.precision) << '\t'
        << full(r.metrics.recall) << '\t' << full(r.metrics.f1) << '\t' << full(r.accuracy) << '\n';
  }
  return out.str();
}

}  // namespace brd
