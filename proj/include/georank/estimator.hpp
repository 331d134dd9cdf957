#pragma once

#include <span>
#include <utility>

#include "georank/core.hpp"

namespace georank {

/// k-th smallest value (1-based), duplicates counted with multiplicity.
/// Throws std::out_of_range unless 1 <= k <= |values|.
double kth_smallest(std::span<const double> values, std::size_t k);

/// Per-phase arrival times of one traced request, all in milliseconds
/// relative to the clients sending at time zero. Vectors are indexed like
/// Deployment::replicas() (index 0 = leader).
struct PhaseTimings {
  double s_req = 0.0;                              // request at the leader
  std::vector<double> s_pro;                       // Propose received
  std::vector<double> s_wrt;                       // Write quorum collected
  std::vector<double> s_acc;                       // Accept quorum collected
  std::vector<std::pair<SiteId, double>> response; // per client site: f+1 responses
};

struct DetailedEstimate {
  double latency_ms = 0.0;
  PhaseTimings trace;
};

/// Estimated client-observed latency of one deployment, found by tracing
/// the Mod-SMaRt message pattern Request -> Propose -> Write -> Accept ->
/// Response over half-RTT link delays. Write and Accept rounds complete at
/// a replica once ceil((n+1)/2) messages arrived; a client accepts after
/// f+1 responses. The returned latency is the client-count-weighted mean
/// over the client sites.
///
/// Requires a leader-based deployment whose size equals params.n.
DetailedEstimate estimate_detailed(const Deployment& deployment, const ClientSet& clients,
                                   const RttMatrix& m, const ProtocolParams& params);

/// Baseline estimate: request leg to the leader + sum of the pairwise
/// replica delays + mean response leg over all (replica, client) pairs.
double estimate_simple(const Deployment& deployment, const ClientSet& clients,
                       const RttMatrix& m);

}  // namespace georank
