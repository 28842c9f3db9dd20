#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "brd/error.hpp"
#include "brd/metrics.hpp"

namespace brd {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext != ".svg") {
    throw Error(ErrorKind::Io, "unsupported image format '" + ext + "' for " + path.string() + " (use .svg)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write image " + path.string());
  out << svg;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

struct Series {
  std::vector<double> values;
  const char* label;
  const char* color;
  bool dashed;
};

// One line-chart panel at (x0, y0) of size w x h.
void panel(std::ostringstream& svg, double x0, double y0, double w, double h, const std::string& ylabel,
           const std::vector<Series>& series, std::size_t epochs) {
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double margin = 0.05 * (hi - lo);
  lo -= margin;
  hi += margin;
  const auto px = [&](std::size_t epoch) {
    return epochs <= 1 ? x0 + w / 2 : x0 + w * static_cast<double>(epoch - 1) / static_cast<double>(epochs - 1);
  };
  const auto py = [&](double v) { return y0 + h - h * (v - lo) / (hi - lo); };

  svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const std::size_t stride = std::max<std::size_t>(1, (epochs + 9) / 10);
  for (std::size_t e = 1; e <= epochs; ++e) {
    if ((e - 1) % stride != 0 && e != epochs) continue;
    svg << "<line x1=\"" << px(e) << "\" y1=\"" << y0 + h << "\" x2=\"" << px(e) << "\" y2=\"" << y0 + h + 5
        << "\" stroke=\"#333\"/>";
    svg << "<text class=\"xtick\" x=\"" << px(e) << "\" y=\"" << y0 + h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << e << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << x0 - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
        << num(v) << "</text>\n";
  }
  svg << "<text x=\"" << x0 + w / 2 << "\" y=\"" << y0 + h + 36
      << "\" text-anchor=\"middle\" font-size=\"12\">epoch</text>\n";
  svg << "<text x=\"" << x0 - 44 << "\" y=\"" << y0 + h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 " << x0 - 44 << ' ' << y0 + h / 2 << ")\">" << ylabel << "</text>\n";

  double legend_y = y0 + 14;
  for (const auto& s : series) {
    svg << "<polyline class=\"series\" data-label=\"" << s.label << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t e = 1; e <= s.values.size(); ++e) {
      svg << px(e) << ',' << py(s.values[e - 1]) << (e < s.values.size() ? " " : "");
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << x0 + w - 8 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
        << s.color << "\">" << s.label << "</text>\n";
    legend_y += 14;
  }
}

}  // namespace

void render_history_plot(std::span<const EpochStats> history, bool has_validation, const std::string& title,
                         const std::filesystem::path& path) {
  if (history.empty()) throw Error(ErrorKind::Input, "cannot plot an empty training history");
  std::vector<Series> acc, loss;
  Series ta{{}, "train", "#1f77b4", false}, va{{}, "validation", "#ff7f0e", true};
  Series tl{{}, "train", "#1f77b4", false}, vl{{}, "validation", "#ff7f0e", true};
  for (const auto& e : history) {
    ta.values.push_back(e.train_accuracy);
    va.values.push_back(e.val_accuracy);
    tl.values.push_back(e.train_loss);
    vl.values.push_back(e.val_loss);
  }
  acc.push_back(ta);
  loss.push_back(tl);
  if (has_validation) {
    acc.push_back(va);
    loss.push_back(vl);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"380\" data-epochs=\"" << history.size()
      << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"900\" height=\"380\" fill=\"white\"/>\n";
  svg << "<text x=\"450\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  panel(svg, 70, 50, 360, 260, "accuracy", acc, history.size());
  panel(svg, 520, 50, 360, 260, "loss", loss, history.size());
  svg << "</svg>\n";
  write_svg(path, svg.str());
}

void render_confusion_heatmap(const ConfusionMatrix& cm, const std::string& title,
                              const std::filesystem::path& path) {
  std::size_t peak = 1;
  for (const auto& row : cm.counts) {
    for (auto v : row) peak = std::max(peak, v);
  }
  const double x0 = 150, y0 = 70, cell = 120;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"460\" height=\"380\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"460\" height=\"380\" fill=\"white\"/>\n";
  svg << "<text x=\"230\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  svg << "<text x=\"" << x0 + cell << "\" y=\"50\" text-anchor=\"middle\" font-size=\"13\">Predicted class</text>\n";
  svg << "<text x=\"40\" y=\"" << y0 + cell << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 40 "
      << y0 + cell << ")\">True class</text>\n";
  static const char* names[] = {"0 non-racism", "1 racism"};
  for (int k = 0; k < 2; ++k) {
    svg << "<text x=\"" << x0 + cell * (k + 0.5) << "\" y=\"" << y0 + 2 * cell + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << names[k] << "</text>\n";
    svg << "<text x=\"" << x0 - 8 << "\" y=\"" << y0 + cell * (k + 0.5) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << names[k] << "</text>\n";
  }
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) {
      const std::size_t v = cm.counts[t][p];
      const double frac = static_cast<double>(v) / static_cast<double>(peak);
      const int shade = static_cast<int>(std::lround(245 - 190 * frac));
      const double x = x0 + cell * p, y = y0 + cell * t;
      svg << "<rect class=\"cell\" data-true=\"" << t << "\" data-pred=\"" << p << "\" x=\"" << x << "\" y=\"" << y
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ',' << shade
          << ",255)\" stroke=\"#333\"/>\n";
      svg << "<text class=\"count\" x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 7
          << "\" text-anchor=\"middle\" font-size=\"22\" fill=\"" << (frac > 0.6 ? "white" : "black") << "\">" << v
          << "</text>\n";
    }
  }
  svg << "<text x=\"230\" y=\"" << y0 + 2 * cell + 50
      << "\" text-anchor=\"middle\" font-size=\"11\">rows = true class, columns = predicted class</text>\n";
  svg << "</svg>\n";
  write_svg(path, svg.str());
}

}  // namespace brd
