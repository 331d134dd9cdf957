#include "georank/oracle.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <vector>

namespace georank {

namespace {

struct EventAfter {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    return std::tie(a.time, a.kind, a.from, a.to) > std::tie(b.time, b.kind, b.from, b.to);
  }
};

}  // namespace

SimResult simulate(const Deployment& deployment, const ClientSet& clients, const RttMatrix& m,
                   const ProtocolParams& params) {
  if (deployment.mode() != DeploymentMode::LeaderBased) {
    throw InputError("the mod-smart simulation requires a leader-based deployment");
  }
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

  // A site hosts at most one replica; map site id -> replica index.
  std::vector<std::size_t> replica_at(m.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    if (replicas[i] >= m.size()) {
      throw std::out_of_range("replica site id " + std::to_string(replicas[i]) +
                              " out of range for " + std::to_string(m.size()) + " sites");
    }
    replica_at[replicas[i]] = i;
  }

  std::vector<std::size_t> writes_seen(n, 0);
  std::vector<std::size_t> accepts_seen(n, 0);

  std::vector<SiteId> client_sites;
  client_sites.reserve(clients.entries().size());
  for (const auto& c : clients.entries()) client_sites.push_back(c.site);
  std::vector<std::size_t> responses_seen(client_sites.size(), 0);
  std::vector<double> finish(client_sites.size(), -1.0);
  auto client_slot = [&](SiteId site) {
    return static_cast<std::size_t>(
        std::find(client_sites.begin(), client_sites.end(), site) - client_sites.begin());
  };

  std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> queue;

  // All clients send at time zero; the model folds them into one request
  // reaching the leader at the client-averaged delay. Request copies to
  // the other replicas play no role in the fault-free path and are not
  // queued.
  double request_at = 0.0;
  for (const auto& c : clients.entries()) {
    request_at += static_cast<double>(c.count) * link_delay(m, c.site, leader);
  }
  request_at /= static_cast<double>(clients.total_count());
  queue.push(SimEvent{request_at, SimEventKind::RequestArrive, leader, leader});

  SimResult result;
  auto broadcast = [&](SimEventKind kind, SiteId from, double now) {
    for (std::size_t j = 0; j < n; ++j) {
      queue.push(SimEvent{now + link_delay(m, from, replicas[j]), kind, from, replicas[j]});
    }
  };

  while (!queue.empty()) {
    const SimEvent ev = queue.top();
    queue.pop();
    ++result.events_processed;
    ++result.events_by_kind[static_cast<std::size_t>(ev.kind)];

    switch (ev.kind) {
      case SimEventKind::RequestArrive:
        broadcast(SimEventKind::ProposeArrive, leader, ev.time);
        break;
      case SimEventKind::ProposeArrive:
        broadcast(SimEventKind::WriteArrive, ev.to, ev.time);
        break;
      case SimEventKind::WriteArrive: {
        const std::size_t i = replica_at[ev.to];
        if (++writes_seen[i] == quorum) {
          broadcast(SimEventKind::AcceptArrive, ev.to, ev.time);
        }
        break;
      }
      case SimEventKind::AcceptArrive: {
        const std::size_t i = replica_at[ev.to];
        if (++accepts_seen[i] == quorum) {
          for (SiteId site : client_sites) {
            queue.push(SimEvent{ev.time + link_delay(m, ev.to, site),
                                SimEventKind::ResponseArrive, ev.to, site});
          }
        }
        break;
      }
      case SimEventKind::ResponseArrive: {
        const std::size_t slot = client_slot(ev.to);
        if (++responses_seen[slot] == params.f + 1) {
          finish[slot] = ev.time;
        }
        break;
      }
    }
  }

  double weighted = 0.0;
  for (std::size_t slot = 0; slot < client_sites.size(); ++slot) {
    weighted += static_cast<double>(clients.entries()[slot].count) * finish[slot];
  }
  result.latency_ms = weighted / static_cast<double>(clients.total_count());
  return result;
}

}  // namespace georank
