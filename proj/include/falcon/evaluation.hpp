#pragma once

#include <span>
#include <vector>

#include "falcon/entailment.hpp"
#include "falcon/metrics.hpp"

namespace falcon {

/// Per-model subsumption degrees of a labeled axiom set.
struct AxiomScores {
  std::vector<std::vector<double>> per_model;  // [axiom][model]
  std::vector<bool> positive;

  int models() const { return per_model.empty() ? 0 : static_cast<int>(per_model.front().size()); }
};

AxiomScores score_axioms(std::span<const ModelHandle> models, const LabeledAxioms& labeled,
                         const QueryOptions& opts);

struct MetricRow {
  double mae = 0, auc = 0, aupr = 0, fmax = 0;
};

/// Metrics of one scoring: MAE over positives, AUC/AUPR/Fmax over both classes.
MetricRow metric_row(std::span<const double> scores, const std::vector<bool>& positive);

/// Scores aggregated over the first k models.
MetricRow multi_metrics(const AxiomScores& s, int k, Aggregate how);
/// Mean over the first k models of each model's own metrics.
MetricRow avg_metrics(const AxiomScores& s, int k);

}  // namespace falcon
