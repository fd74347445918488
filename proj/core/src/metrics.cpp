#include "cpsarch/metrics.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace cpsarch {

using nlohmann::json;

MetricsRow row_of(const MetricsReport& r) {
  return MetricsRow{r.total_bc, r.relevant_bc, r.total_cc, r.relevant_cc,
                    r.hd};
}

long long block_count(const Model& model, const CatalogTable& table,
                      CountScope scope) {
  if (scope == CountScope::Total) {
    return static_cast<long long>(model.blocks.size());
  }
  long long count = 0;
  for (const Block& b : model.blocks) {
    if (relevance(b.block_type, table) == RelevanceClass::Relevant) ++count;
  }
  return count;
}

long long connection_count(const Model& model, const CatalogTable& table,
                           CountScope scope) {
  if (scope == CountScope::Total) {
    return static_cast<long long>(model.connections.size());
  }
  std::map<std::string_view, std::string_view> type_of;
  for (const Block& b : model.blocks) type_of.emplace(b.id, b.block_type);
  long long count = 0;
  for (const Connection& c : model.connections) {
    bool src_rel = relevance(type_of.at(c.src_block), table) ==
                   RelevanceClass::Relevant;
    bool dst_rel = relevance(type_of.at(c.dst_block), table) ==
                   RelevanceClass::Relevant;
    if (src_rel || dst_rel) ++count;
  }
  return count;
}

int hierarchical_depth(const Model& model) {
  return tree_depth(subsystem_tree(model));
}

MetricsReport compute_metrics(const Model& model, const CatalogTable& table) {
  MetricsReport report;
  report.total_bc = block_count(model, table, CountScope::Total);
  report.relevant_bc = block_count(model, table, CountScope::Relevant);
  report.total_cc = connection_count(model, table, CountScope::Total);
  report.relevant_cc = connection_count(model, table, CountScope::Relevant);
  report.hd = hierarchical_depth(model);
  for (CategoryId c : kAllCategories) report.per_category_bc[c] = 0;
  for (const Block& b : model.blocks) {
    if (auto cat = table.find(b.block_type)) ++report.per_category_bc[*cat];
    if (b.block_type == "Inport") ++report.inport_count;
    if (b.block_type == "Outport") ++report.outport_count;
  }
  return report;
}

DifferenceReport difference(const Model& ai_model, const Model& trad_model,
                            const CatalogTable& table) {
  auto relevant_histogram = [&table](const Model& m) {
    std::map<std::string, long long> hist;
    for (const Block& b : m.blocks) {
      if (table.find(b.block_type)) ++hist[b.block_type];
    }
    return hist;
  };

  std::map<std::string, long long> ai_hist = relevant_histogram(ai_model);
  std::map<std::string, long long> trad_hist = relevant_histogram(trad_model);

  DifferenceReport report;
  for (CategoryId c : kAllCategories) report.per_category[c] = 0;

  auto record = [&](const std::string& type) {
    if (report.per_block_type.contains(type)) return;
    long long ai_n = ai_hist.contains(type) ? ai_hist[type] : 0;
    long long trad_n = trad_hist.contains(type) ? trad_hist[type] : 0;
    long long diff = ai_n - trad_n;
    report.per_block_type[type] = diff;
    report.per_category[*table.find(type)] += diff;
  };
  for (const auto& [type, n] : ai_hist) record(type);
  for (const auto& [type, n] : trad_hist) record(type);
  return report;
}

std::string_view table_metric_name(TableMetric metric) {
  switch (metric) {
    case TableMetric::TotalBc:
      return "Total BC";
    case TableMetric::RelevantBc:
      return "Relevant BC";
    case TableMetric::TotalCc:
      return "Total CC";
    case TableMetric::RelevantCc:
      return "Relevant CC";
    case TableMetric::Hd:
      return "HD";
  }
  return "";
}

long long metric_value(const MetricsRow& row, TableMetric metric) {
  switch (metric) {
    case TableMetric::TotalBc:
      return row.total_bc;
    case TableMetric::RelevantBc:
      return row.relevant_bc;
    case TableMetric::TotalCc:
      return row.total_cc;
    case TableMetric::RelevantCc:
      return row.relevant_cc;
    case TableMetric::Hd:
      return row.hd;
  }
  return 0;
}

CorpusAggregate aggregate_corpus(std::vector<CorpusEntry> rows) {
  if (rows.empty()) throw EmptyCorpus("corpus aggregation over zero systems");
  std::sort(rows.begin(), rows.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              return a.system_id < b.system_id;
            });

  CorpusAggregate aggregate;
  const long long n = static_cast<long long>(rows.size());
  for (TableMetric metric : kTableMetrics) {
    long long t_sum = 0;
    long long ai_sum = 0;
    bool pct_defined = true;
    Rational pct_sum = Rational::of(0);
    for (const CorpusEntry& row : rows) {
      long long t = metric_value(row.traditional, metric);
      long long ai = metric_value(row.ai, metric);
      t_sum += t;
      ai_sum += ai;
      if (t == 0) {
        pct_defined = false;
      } else if (pct_defined) {
        pct_sum = pct_sum + Rational::of((ai - t) * 100, t);
      }
    }
    MetricAggregate agg;
    agg.traditional_avg = Rational::of(t_sum, n);
    agg.ai_avg = Rational::of(ai_sum, n);
    if (t_sum != 0) {
      agg.pct_diff_of_averages =
          (agg.ai_avg - agg.traditional_avg) / agg.traditional_avg *
          Rational::of(100);
    }
    if (pct_defined) {
      agg.mean_of_pct_diffs = pct_sum / Rational::of(n);
    }
    aggregate.metrics[metric] = agg;
  }
  aggregate.per_system = std::move(rows);
  return aggregate;
}

// --- serialization ---

namespace {

std::string signed_pct(const Rational& r) {
  std::string s = r.to_decimal(1);
  if (!s.empty() && s[0] != '-') s.insert(s.begin(), '+');
  return s;
}

json category_map_json(const std::map<CategoryId, long long>& m) {
  json out = json::object();
  for (const auto& [cat, value] : m) {
    out[std::string(category_code(cat))] = value;
  }
  return out;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& report,
                            const std::string& model_name) {
  json doc;
  doc["model"] = model_name;
  doc["Total BC"] = report.total_bc;
  doc["Relevant BC"] = report.relevant_bc;
  doc["Total CC"] = report.total_cc;
  doc["Relevant CC"] = report.relevant_cc;
  doc["HD"] = report.hd;
  doc["inports"] = report.inport_count;
  doc["outports"] = report.outport_count;
  doc["per_category_bc"] = category_map_json(report.per_category_bc);
  return doc.dump(2) + "\n";
}

std::string metrics_to_csv(const MetricsReport& report,
                           const std::string& model_name) {
  std::ostringstream os;
  os << "Model,Total BC,Relevant BC,Total CC,Relevant CC,HD,Inports,Outports";
  for (CategoryId c : kAllCategories) os << ',' << category_code(c);
  os << '\n';
  os << model_name << ',' << report.total_bc << ',' << report.relevant_bc
     << ',' << report.total_cc << ',' << report.relevant_cc << ','
     << report.hd << ',' << report.inport_count << ','
     << report.outport_count;
  for (CategoryId c : kAllCategories) {
    os << ',' << report.per_category_bc.at(c);
  }
  os << '\n';
  return os.str();
}

std::string difference_to_json(const DifferenceReport& report) {
  json doc;
  doc["per_block_type"] = report.per_block_type;
  doc["per_category"] = category_map_json(report.per_category);
  return doc.dump(2) + "\n";
}

std::string difference_to_csv(const DifferenceReport& report) {
  std::ostringstream os;
  os << "Kind,Key,Difference\n";
  for (const auto& [type, diff] : report.per_block_type) {
    os << "block_type," << type << ',' << diff << '\n';
  }
  for (const auto& [cat, diff] : report.per_category) {
    os << "category," << category_code(cat) << ',' << diff << '\n';
  }
  return os.str();
}

std::string corpus_to_json(const CorpusAggregate& aggregate) {
  json systems = json::array();
  for (const CorpusEntry& row : aggregate.per_system) {
    auto row_json = [](const MetricsRow& r) {
      json j;
      j["Total BC"] = r.total_bc;
      j["Relevant BC"] = r.relevant_bc;
      j["Total CC"] = r.total_cc;
      j["Relevant CC"] = r.relevant_cc;
      j["HD"] = r.hd;
      return j;
    };
    systems.push_back({{"system", row.system_id},
                       {"traditional", row_json(row.traditional)},
                       {"ai", row_json(row.ai)}});
  }

  json metrics = json::object();
  for (TableMetric metric : kTableMetrics) {
    const MetricAggregate& agg = aggregate.metrics.at(metric);
    json j;
    j["traditional_avg"] = agg.traditional_avg.to_decimal(2);
    j["ai_avg"] = agg.ai_avg.to_decimal(2);
    j["pct_diff_of_averages"] = agg.pct_diff_of_averages
                                    ? json(agg.pct_diff_of_averages->to_decimal(1))
                                    : json(nullptr);
    j["mean_of_pct_diffs"] = agg.mean_of_pct_diffs
                                 ? json(agg.mean_of_pct_diffs->to_decimal(1))
                                 : json(nullptr);
    metrics[std::string(table_metric_name(metric))] = j;
  }

  json doc;
  doc["systems"] = systems;
  doc["aggregates"] = metrics;
  doc["note"] =
      "Percentage differences are reported two ways (ratio of averages and "
      "mean of per-system ratios); the two statistics generally disagree.";
  return doc.dump(2) + "\n";
}

std::string corpus_to_csv(const CorpusAggregate& aggregate) {
  std::ostringstream os;
  os << "System,Model,Total BC,Relevant BC,Total CC,Relevant CC,HD\n";
  for (const CorpusEntry& row : aggregate.per_system) {
    auto emit = [&os](const std::string& id, const char* variant,
                      const MetricsRow& r) {
      os << id << ',' << variant << ',' << r.total_bc << ',' << r.relevant_bc
         << ',' << r.total_cc << ',' << r.relevant_cc << ',' << r.hd << '\n';
    };
    emit(row.system_id, "T", row.traditional);
    emit(row.system_id, "AI", row.ai);
  }

  os << "Average,T";
  for (TableMetric m : kTableMetrics) {
    os << ',' << aggregate.metrics.at(m).traditional_avg.to_decimal(2);
  }
  os << "\nAverage,AI";
  for (TableMetric m : kTableMetrics) {
    os << ',' << aggregate.metrics.at(m).ai_avg.to_decimal(2);
  }
  os << "\n% Diff (ratio of averages),-";
  for (TableMetric m : kTableMetrics) {
    const auto& pct = aggregate.metrics.at(m).pct_diff_of_averages;
    os << ',' << (pct ? signed_pct(*pct) : "n/a");
  }
  os << "\n% Diff (mean of per-system),-";
  for (TableMetric m : kTableMetrics) {
    const auto& pct = aggregate.metrics.at(m).mean_of_pct_diffs;
    os << ',' << (pct ? signed_pct(*pct) : "n/a");
  }
  os << '\n';
  return os.str();
}

}  // namespace cpsarch
