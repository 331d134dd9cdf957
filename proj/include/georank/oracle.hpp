#pragma once

#include <array>
#include <cstddef>

#include "georank/core.hpp"

namespace georank {

enum class SimEventKind : std::uint8_t {
  RequestArrive = 0,
  ProposeArrive,
  WriteArrive,
  AcceptArrive,
  ResponseArrive,
};

struct SimEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::RequestArrive;
  SiteId from = 0;
  SiteId to = 0;
};

struct SimResult {
  double latency_ms = 0.0;
  std::size_t events_processed = 0;
  /// Indexed by SimEventKind. Always n Propose, n^2 Write, n^2 Accept,
  /// n * |distinct client sites| Response, and 1 Request.
  std::array<std::size_t, 5> events_by_kind{};
};

/// Discrete-event replay of the fault-free Mod-SMaRt exchange: the request
/// reaches the leader at the client-averaged delay, the leader broadcasts
/// Propose, replicas broadcast Write on Propose receipt, broadcast Accept
/// on their ceil((n+1)/2)-th Write, and respond to every client site on
/// their ceil((n+1)/2)-th Accept; a client site finishes with its (f+1)-th
/// Response. Returns the client-count-weighted mean finish time.
///
/// Deliberately shares no order-statistic arithmetic with
/// estimate_detailed, so the two paths can cross-check each other.
SimResult simulate(const Deployment& deployment, const ClientSet& clients, const RttMatrix& m,
                   const ProtocolParams& params);

}  // namespace georank
