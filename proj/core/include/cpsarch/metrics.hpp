#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpsarch/catalog.hpp"
#include "cpsarch/model.hpp"
#include "cpsarch/rational.hpp"

namespace cpsarch {

enum class CountScope { Total, Relevant };

/// The per-model architectural numbers: block count, connection count and
/// hierarchical depth in total and relevant scope, a per-category block
/// histogram, and the separately tracked port counts.
struct MetricsReport {
  long long total_bc = 0;
  long long relevant_bc = 0;
  long long total_cc = 0;
  long long relevant_cc = 0;
  int hd = 1;
  std::map<CategoryId, long long> per_category_bc;  // all eight keys present
  long long inport_count = 0;
  long long outport_count = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// The five table columns used for corpus aggregation.
struct MetricsRow {
  long long total_bc = 0;
  long long relevant_bc = 0;
  long long total_cc = 0;
  long long relevant_cc = 0;
  int hd = 1;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

MetricsRow row_of(const MetricsReport& report);

/// Counts blocks: Total counts every block (atomic blocks and SubSystem
/// containers alike), Relevant counts blocks whose type is cataloged.
long long block_count(const Model& model, const CatalogTable& table,
                      CountScope scope);

/// Counts connections: Total counts every edge; Relevant counts edges with
/// at least one relevant endpoint.
long long connection_count(const Model& model, const CatalogTable& table,
                           CountScope scope);

/// Maximum subsystem nesting depth; a flat model has depth 1.
int hierarchical_depth(const Model& model);

MetricsReport compute_metrics(const Model& model, const CatalogTable& table);

/// Per-block-type occurrence difference (AI minus traditional), computed
/// over relevant block types only; positive values mean the AI-driven model
/// uses the type more.
struct DifferenceReport {
  std::map<std::string, long long> per_block_type;
  std::map<CategoryId, long long> per_category;  // all eight keys present

  friend bool operator==(const DifferenceReport&,
                         const DifferenceReport&) = default;
};

DifferenceReport difference(const Model& ai_model, const Model& trad_model,
                            const CatalogTable& table);

// --- corpus aggregation ---

enum class TableMetric { TotalBc, RelevantBc, TotalCc, RelevantCc, Hd };

inline constexpr std::array<TableMetric, 5> kTableMetrics = {
    TableMetric::TotalBc, TableMetric::RelevantBc, TableMetric::TotalCc,
    TableMetric::RelevantCc, TableMetric::Hd};

/// "Total BC", "Relevant BC", "Total CC", "Relevant CC", "HD".
std::string_view table_metric_name(TableMetric metric);

long long metric_value(const MetricsRow& row, TableMetric metric);

struct CorpusEntry {
  std::string system_id;
  MetricsRow traditional;
  MetricsRow ai;
};

/// Per-metric aggregate. The percentage difference between variants is
/// reported two ways, because they genuinely differ: the ratio of the
/// averages, and the mean of the per-system ratios. Either is undefined
/// (nullopt) when a traditional-side value is zero.
struct MetricAggregate {
  Rational traditional_avg;
  Rational ai_avg;
  std::optional<Rational> pct_diff_of_averages;
  std::optional<Rational> mean_of_pct_diffs;
};

struct CorpusAggregate {
  std::vector<CorpusEntry> per_system;  // sorted by system id
  std::map<TableMetric, MetricAggregate> metrics;
};

class EmptyCorpus : public std::runtime_error {
 public:
  explicit EmptyCorpus(const std::string& what) : std::runtime_error(what) {}
};

/// Exact arithmetic means over all systems plus both percentage-difference
/// statistics. Throws EmptyCorpus on an empty row list.
CorpusAggregate aggregate_corpus(std::vector<CorpusEntry> rows);

// --- serialization (column names match the table headers exactly) ---

std::string metrics_to_json(const MetricsReport& report,
                            const std::string& model_name);
std::string metrics_to_csv(const MetricsReport& report,
                           const std::string& model_name);
std::string difference_to_json(const DifferenceReport& report);
std::string difference_to_csv(const DifferenceReport& report);
std::string corpus_to_json(const CorpusAggregate& aggregate);
std::string corpus_to_csv(const CorpusAggregate& aggregate);

}  // namespace cpsarch
