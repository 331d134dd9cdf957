#include "georank/estimator.hpp"

#include <algorithm>
#include <vector>

namespace georank {

double kth_smallest(std::span<const double> values, std::size_t k) {
  if (k < 1 || k > values.size()) {
    throw std::out_of_range("k=" + std::to_string(k) + " out of range for " +
                            std::to_string(values.size()) + " values");
  }
  std::vector<double> copy(values.begin(), values.end());
  std::nth_element(copy.begin(), copy.begin() + (k - 1), copy.end());
  return copy[k - 1];
}

namespace {

void require_leader_based(const Deployment& deployment) {
  if (deployment.mode() != DeploymentMode::LeaderBased) {
    throw InputError("the mod-smart estimators require a leader-based deployment");
  }
}

double request_arrival(const ClientSet& clients, const RttMatrix& m, SiteId leader) {
  double weighted = 0.0;
  for (const auto& c : clients.entries()) {
    weighted += static_cast<double>(c.count) * link_delay(m, c.site, leader);
  }
  return weighted / static_cast<double>(clients.total_count());
}

}  // namespace

DetailedEstimate estimate_detailed(const Deployment& deployment, const ClientSet& clients,
                                   const RttMatrix& m, const ProtocolParams& params) {
  require_leader_based(deployment);
  const auto& replicas = deployment.replicas();
  const std::size_t n = replicas.size();
  if (params.n != n) {
    throw InputError("params.n=" + std::to_string(params.n) + " does not match deployment size " +
                     std::to_string(n));
  }
  if (params.f + 1 > n) {
    throw InputError("f+1=" + std::to_string(params.f + 1) + " responses cannot come from " +
                     std::to_string(n) + " replicas");
  }
  const std::size_t quorum = params.quorum();
  const SiteId leader = replicas[0];

  DetailedEstimate out;
  PhaseTimings& t = out.trace;
  t.s_req = request_arrival(clients, m, leader);

  t.s_pro.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.s_pro[i] = t.s_req + link_delay(m, leader, replicas[i]);
  }

  std::vector<double> arrivals(n);
  t.s_wrt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      arrivals[j] = t.s_pro[j] + link_delay(m, replicas[j], replicas[i]);
    }
    t.s_wrt[i] = kth_smallest(arrivals, quorum);
  }

  t.s_acc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sent = params.accept_timing == AcceptTiming::SenderBased ? t.s_wrt[j]
                                                                            : t.s_wrt[i];
      arrivals[j] = sent + link_delay(m, replicas[j], replicas[i]);
    }
    t.s_acc[i] = kth_smallest(arrivals, quorum);
  }

  double weighted = 0.0;
  t.response.reserve(clients.entries().size());
  for (const auto& c : clients.entries()) {
    for (std::size_t i = 0; i < n; ++i) {
      arrivals[i] = t.s_acc[i] + link_delay(m, replicas[i], c.site);
    }
    const double f_c = kth_smallest(arrivals, params.f + 1);
    t.response.emplace_back(c.site, f_c);
    weighted += static_cast<double>(c.count) * f_c;
  }
  out.latency_ms = weighted / static_cast<double>(clients.total_count());
  return out;
}

double estimate_simple(const Deployment& deployment, const ClientSet& clients,
                       const RttMatrix& m) {
  require_leader_based(deployment);
  const auto& replicas = deployment.replicas();
  const std::size_t n = replicas.size();

  const double s_req = request_arrival(clients, m, replicas[0]);

  double s_con = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      s_con += link_delay(m, replicas[i], replicas[j]);
    }
  }

  double weighted = 0.0;
  for (const auto& c : clients.entries()) {
    for (std::size_t i = 0; i < n; ++i) {
      weighted += static_cast<double>(c.count) * link_delay(m, replicas[i], c.site);
    }
  }
  const double s_res =
      weighted / (static_cast<double>(n) * static_cast<double>(clients.total_count()));

  return s_req + s_con + s_res;
}

}  // namespace georank
