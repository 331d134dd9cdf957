#pragma once

#include <iosfwd>
#include <span>

#include "georank/core.hpp"
#include "georank/enumerate.hpp"

namespace georank {

struct RankingEntry {
  Deployment deployment;
  double latency_ms = 0.0;
  std::uint32_t rank = 0;  // 1-based, no gaps
};

/// Deployments sorted ascending by latency. Ties are broken by canonical
/// deployment order so the ranking is deterministic.
class Ranking {
 public:
  Ranking(SiteCatalog catalog, std::vector<std::pair<Deployment, double>> latencies);

  const SiteCatalog& catalog() const { return catalog_; }
  const std::vector<RankingEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const RankingEntry& best() const { return entries_.front(); }

 private:
  SiteCatalog catalog_;
  std::vector<RankingEntry> entries_;
};

/// Wall-clock split of a ranking run; evaluation parallelizes, the
/// sort/materialize stage does not.
struct RankTimings {
  double evaluate_seconds = 0.0;
  double sort_seconds = 0.0;
};

/// Evaluates every deployment in the space with the chosen estimator and
/// returns the sorted ranking. Deployment evaluation is split across
/// `workers` threads over disjoint index ranges; the result is identical
/// for every worker count.
Ranking rank(const DeploymentSpace& space, const ClientSet& clients, const RttMatrix& m,
             const ProtocolParams& params, EstimatorVariant estimator, unsigned workers = 1,
             RankTimings* timings = nullptr);

struct RankPair {
  std::string deployment;  // canonical identity
  std::uint32_t rank_estimated = 0;
  std::uint32_t rank_reference = 0;
};

struct RankingComparison {
  double rmse = 0.0;  // vs. the ideal ranking (identical rank on both sides)
  double cc = 0.0;    // Pearson correlation of the rank pairs
  std::vector<RankPair> pairs;  // ordered by estimated rank
};

/// Matches deployments across the two rankings by canonical identity and
/// reports rank-space RMSE and correlation. Both rankings must cover the
/// same deployment set.
RankingComparison compare(const Ranking& estimated, const Ranking& reference);

/// Pearson correlation coefficient; 1.0 for degenerate single-point input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Ranking CSV: header "rank,leader,followers,latency_ms"; followers are
/// ';'-joined in ascending id order.
void store_ranking(std::ostream& out, const Ranking& ranking);

/// Loads a reference ranking. Accepts three layouts, distinguished by the
/// header row:
///   - ranking CSV as written by store_ranking;
///   - "deployment,latency_ms": pre-aggregated measured latencies;
///   - "deployment,<50 sample columns>": raw measurements; the top five
///     and bottom five values are dropped and the remaining 40 averaged.
/// Deployments use the canonical "Leader|F1,F2,F3" identity. Duplicate
/// deployments are rejected.
Ranking load_reference(std::istream& in);

/// Scatter CSV: header "deployment,rank_estimated,rank_reference".
void store_scatter(std::ostream& out, const RankingComparison& comparison);

}  // namespace georank
