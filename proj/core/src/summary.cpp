#include "jigsaw/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "jigsaw/error.hpp"
#include "jigsaw/image_io.hpp"

namespace jigsaw {
namespace fs = std::filesystem;

namespace {

constexpr const char* kMetrics[] = {"dc", "nc", "lc"};
constexpr const char* kRatios[] = {"444", "420"};

double metric_value(const ResultRow& r, const std::string& metric) {
  if (metric == "dc") {
    return r.dc;
  }
  if (metric == "nc") {
    return r.nc;
  }
  return r.lc;
}

std::string metric_title(const std::string& metric) {
  if (metric == "dc") {
    return "Direct comparison";
  }
  if (metric == "nc") {
    return "Neighbor comparison";
  }
  return "Largest component";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace

std::vector<SummaryRow> summarize_rows(std::span<const ResultRow> rows) {
  if (rows.empty()) {
    throw ParameterError("no result rows to summarize");
  }
  using Key = std::tuple<std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    Key key{r.dataset, r.qf, r.subsampling};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
    }
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const std::string metric : kMetrics) {
    for (const Key& key : order) {
      std::vector<double> values;
      for (const ResultRow* r : groups[key]) {
        values.push_back(metric_value(*r, metric));
      }
      out.push_back({metric, std::get<0>(key), std::get<1>(key), std::get<2>(key), summarize(values)});
    }
  }
  return out;
}

std::string format_summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "metric,dataset,qf,sr,q1,median,q3,mean,wlow,whigh,n\n";
  for (const SummaryRow& r : rows) {
    const BoxplotSummary& s = r.stats;
    out += r.metric + "," + r.dataset + "," + r.qf + "," + r.sr + "," + num(s.q1) + "," + num(s.median) + "," +
           num(s.q3) + "," + num(s.mean) + "," + num(s.whisker_low) + "," + num(s.whisker_high) + "," +
           std::to_string(s.n) + "\n";
  }
  return out;
}

std::string render_boxplot_svg(std::span<const SummaryRow> rows, const std::string& metric,
                               const std::string& sr) {
  std::vector<const SummaryRow*> boxes;
  for (const SummaryRow& r : rows) {
    if (r.metric == metric && (r.sr == sr || r.sr == "none")) {
      boxes.push_back(&r);
    }
  }
  // Group by dataset in order of appearance, control first, then rising Qf.
  std::vector<std::string> datasets;
  for (const SummaryRow* r : boxes) {
    if (std::find(datasets.begin(), datasets.end(), r->dataset) == datasets.end()) {
      datasets.push_back(r->dataset);
    }
  }
  std::stable_sort(boxes.begin(), boxes.end(), [&](const SummaryRow* a, const SummaryRow* b) {
    const auto da = std::find(datasets.begin(), datasets.end(), a->dataset) - datasets.begin();
    const auto db = std::find(datasets.begin(), datasets.end(), b->dataset) - datasets.begin();
    if (da != db) {
      return da < db;
    }
    const bool ca = a->qf == "none";
    const bool cb = b->qf == "none";
    if (ca != cb) {
      return ca;
    }
    return !ca && std::stoi(a->qf) < std::stoi(b->qf);
  });

  const double left = 60;
  const double top = 40;
  const double plot_h = 300;
  const double slot = 56;
  const double gap = 30;
  const double plot_w = std::max<double>(1, static_cast<double>(boxes.size())) * slot +
                        static_cast<double>(datasets.size()) * gap;
  const double width = left + plot_w + 20;
  const double height = top + plot_h + 70;
  auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" +
                    px(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + px(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
         metric_title(metric) + " (" + metric + "), Sr " + sr + "</text>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    svg += "<line x1=\"" + px(left) + "\" x2=\"" + px(left + plot_w) + "\" y1=\"" + px(y_of(v)) + "\" y2=\"" +
           px(y_of(v)) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + px(left - 6) + "\" y=\"" + px(y_of(v) + 4) + "\" text-anchor=\"end\">" + num(v) +
           "</text>\n";
  }
  svg += "<line x1=\"" + px(left) + "\" x2=\"" + px(left) + "\" y1=\"" + px(top) + "\" y2=\"" +
         px(top + plot_h) + "\" stroke=\"black\"/>\n";

  double x = left + gap / 2;
  std::string current;
  double group_start = x;
  auto close_group = [&](double end) {
    if (!current.empty()) {
      svg += "<text x=\"" + px((group_start + end) / 2) + "\" y=\"" + px(top + plot_h + 44) +
             "\" text-anchor=\"middle\" font-size=\"12\">" + current + "</text>\n";
    }
  };
  for (const SummaryRow* r : boxes) {
    if (r->dataset != current) {
      close_group(x);
      if (!current.empty()) {
        x += gap;
      }
      current = r->dataset;
      group_start = x;
    }
    const BoxplotSummary& s = r->stats;
    const double cx = x + slot / 2;
    const double half = slot * 0.3;
    svg += "<line x1=\"" + px(cx) + "\" x2=\"" + px(cx) + "\" y1=\"" + px(y_of(s.whisker_low)) + "\" y2=\"" +
           px(y_of(s.whisker_high)) + "\" stroke=\"black\"/>\n";
    for (const double w : {s.whisker_low, s.whisker_high}) {
      svg += "<line x1=\"" + px(cx - half / 2) + "\" x2=\"" + px(cx + half / 2) + "\" y1=\"" + px(y_of(w)) +
             "\" y2=\"" + px(y_of(w)) + "\" stroke=\"black\"/>\n";
    }
    svg += "<rect x=\"" + px(cx - half) + "\" y=\"" + px(y_of(s.q3)) + "\" width=\"" + px(2 * half) +
           "\" height=\"" + px(std::max(0.5, y_of(s.q1) - y_of(s.q3))) +
           "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + px(cx - half) + "\" x2=\"" + px(cx + half) + "\" y1=\"" + px(y_of(s.median)) +
           "\" y2=\"" + px(y_of(s.median)) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(y_of(s.mean)) + "\" r=\"2.5\" fill=\"black\"/>\n";
    for (const double o : s.outliers) {
      svg += "<circle cx=\"" + px(cx) + "\" cy=\"" + px(y_of(o)) +
             "\" r=\"2\" fill=\"none\" stroke=\"#555\"/>\n";
    }
    const std::string label = r->qf == "none" ? "none" : "Qf " + r->qf;
    svg += "<text x=\"" + px(cx) + "\" y=\"" + px(top + plot_h + 16) + "\" text-anchor=\"middle\">" + label +
           "</text>\n";
    x += slot;
  }
  close_group(x);
  svg += "</svg>\n";
  return svg;
}

std::vector<fs::path> render_summary(std::span<const ResultRow> rows, const fs::path& dir) {
  const std::vector<SummaryRow> summary = summarize_rows(rows);
  fs::create_directories(dir);
  std::vector<fs::path> written;
  written.push_back(dir / "summary.csv");
  write_text(written.back(), format_summary_csv(summary));
  for (const std::string metric : kMetrics) {
    for (const std::string sr : kRatios) {
      written.push_back(dir / (metric + "_" + sr + ".svg"));
      write_text(written.back(), render_boxplot_svg(summary, metric, sr));
    }
  }
  return written;
}

}  // namespace jigsaw
