#include "falcon/evaluation.hpp"

#include <stdexcept>

namespace falcon {

AxiomScores score_axioms(std::span<const ModelHandle> models, const LabeledAxioms& labeled,
                         const QueryOptions& opts) {
  AxiomScores out;
  auto add = [&](const Subsumption& s, bool positive) {
    out.per_model.push_back(subsumption_degree(models, *s.sub, *s.sup, opts).per_model);
    out.positive.push_back(positive);
  };
  for (const auto& s : labeled.entailed) add(s, true);
  for (const auto& s : labeled.unprovable) add(s, false);
  return out;
}

MetricRow metric_row(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw std::invalid_argument("one label per score required");
  std::vector<double> pos_scores;
  std::vector<ScoredExample> ex;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ex.push_back({positive[i], scores[i]});
    if (positive[i]) pos_scores.push_back(scores[i]);
  }
  return {mae_entailed(pos_scores), auc(ex), aupr(ex), fmax(ex)};
}

namespace {

void check_k(const AxiomScores& s, int k) {
  if (k < 1 || k > s.models()) throw std::invalid_argument("k outside the scored ensemble");
}

}  // namespace

MetricRow multi_metrics(const AxiomScores& s, int k, Aggregate how) {
  check_k(s, k);
  std::vector<double> scores;
  for (const auto& row : s.per_model)
    scores.push_back(aggregate(std::span(row).first(static_cast<std::size_t>(k)), how));
  return metric_row(scores, s.positive);
}

MetricRow avg_metrics(const AxiomScores& s, int k) {
  check_k(s, k);
  MetricRow mean;
  for (int m = 0; m < k; ++m) {
    std::vector<double> scores;
    for (const auto& row : s.per_model) scores.push_back(row[static_cast<std::size_t>(m)]);
    const auto r = metric_row(scores, s.positive);
    mean.mae += r.mae / k;
    mean.auc += r.auc / k;
    mean.aupr += r.aupr / k;
    mean.fmax += r.fmax / k;
  }
  return mean;
}

}  // namespace falcon
