#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jigsaw/experiment.hpp"
#include "jigsaw/metrics.hpp"

namespace jigsaw {

struct SummaryRow {
  std::string metric;  // dc | nc | lc
  std::string dataset;
  std::string qf;
  std::string sr;
  BoxplotSummary stats;
};

// One row per (metric, dataset, condition), in order of first appearance.
std::vector<SummaryRow> summarize_rows(std::span<const ResultRow> rows);

// Columns: metric,dataset,qf,sr,q1,median,q3,mean,wlow,whigh,n
std::string format_summary_csv(std::span<const SummaryRow> rows);

// Box plots of one metric for one subsampling ratio: a group per dataset, a
// box per quality factor, the uncompressed control first.
std::string render_boxplot_svg(std::span<const SummaryRow> rows, const std::string& metric,
                               const std::string& sr);

// Writes summary.csv and <metric>_<sr>.svg for dc/nc/lc × 444/420 into dir.
// Throws ParameterError on empty input. Returns the written paths.
std::vector<std::filesystem::path> render_summary(std::span<const ResultRow> rows,
                                                  const std::filesystem::path& dir);

}  // namespace jigsaw
