#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "georank/enumerate.hpp"
#include "georank/estimator.hpp"
#include "test_util.hpp"

using namespace georank;
using test::close_rel;
using test::make_catalog;
using test::random_matrix;
using test::random_metric_matrix;
using test::uniform_matrix;

namespace {

ProtocolParams params_n4() {
  ProtocolParams p;
  p.n = 4;
  p.f = 1;
  return p;
}

}  // namespace

TEST_CASE("kth_smallest order statistics") {
  const std::vector<double> a{5, 1, 3};
  CHECK(kth_smallest(a, 1) == 1);
  CHECK(kth_smallest(a, 2) == 3);
  CHECK(kth_smallest(a, 3) == 5);

  const double d = 42.5;
  const std::vector<double> dup{d, d, d, 0};
  CHECK(kth_smallest(dup, 3) == d);  // duplicates counted with multiplicity

  const std::vector<double> single{7};
  CHECK(kth_smallest(single, 1) == 7);

  CHECK_THROWS_AS(kth_smallest(a, 0), std::out_of_range);
  CHECK_THROWS_AS(kth_smallest(a, 4), std::out_of_range);
}

// Uniform matrix (every inter-site rtt = d), client at the leader site.
// Hand trace: s_req = 0; propose reaches the others at d/2; every write
// quorum completes at d; every accept quorum at 3d/2; the second response
// at the client arrives at 3d/2 + d/2 = 2d.
TEST_CASE("symmetric uniform matrix gives exactly 2d (detailed)") {
  for (const double d : {1.0, 10.0, 100.0}) {
    const RttMatrix m = uniform_matrix(6, d);
    const auto deployment = Deployment::leader_based(2, {0, 3, 5});
    const auto clients = ClientSet::single(2);
    const auto est = estimate_detailed(deployment, clients, m, params_n4());

    CHECK(est.latency_ms == 2.0 * d);
    CHECK(est.trace.s_req == 0.0);
    CHECK(est.trace.s_pro == std::vector<double>{0.0, d / 2, d / 2, d / 2});
    CHECK(est.trace.s_wrt == std::vector<double>{d, d, d, d});
    CHECK(est.trace.s_acc == std::vector<double>{1.5 * d, 1.5 * d, 1.5 * d, 1.5 * d});
    REQUIRE(est.trace.response.size() == 1);
    CHECK(est.trace.response[0].second == 2.0 * d);

    // both accept-timing readings agree on a fully symmetric matrix
    ProtocolParams literal = params_n4();
    literal.accept_timing = AcceptTiming::PaperLiteral;
    CHECK(estimate_detailed(deployment, clients, m, literal).latency_ms == 2.0 * d);
  }
}

// Same setting for the baseline: 0 + C(4,2)*(d/2) + (0 + 3*(d/2))/4 = 27d/8.
TEST_CASE("symmetric uniform matrix gives exactly 27d/8 (simple)") {
  for (const double d : {1.0, 10.0, 100.0}) {
    const RttMatrix m = uniform_matrix(5, d);
    const auto deployment = Deployment::leader_based(1, {0, 2, 4});
    CHECK(estimate_simple(deployment, ClientSet::single(1), m) == 27.0 * d / 8.0);
  }
}

TEST_CASE("all-zero matrix collapses every phase to zero") {
  const RttMatrix zero = RttMatrix::unchecked(4, std::vector<double>(16, 0.0));
  const auto deployment = Deployment::leader_based(0, {1, 2, 3});
  const auto clients = ClientSet::single(3);
  CHECK(estimate_detailed(deployment, clients, zero, params_n4()).latency_ms == 0.0);
  CHECK(estimate_simple(deployment, clients, zero) == 0.0);
}

TEST_CASE("estimators reject leaderless deployments and bad params") {
  const RttMatrix m = uniform_matrix(5, 10.0);
  const auto leaderless = Deployment::leaderless({0, 1, 2, 3});
  CHECK_THROWS_AS(estimate_detailed(leaderless, ClientSet::single(0), m, params_n4()), InputError);
  CHECK_THROWS_AS(estimate_simple(leaderless, ClientSet::single(0), m), InputError);

  const auto deployment = Deployment::leader_based(0, {1, 2, 3});
  ProtocolParams wrong_n = params_n4();
  wrong_n.n = 5;
  CHECK_THROWS_AS(estimate_detailed(deployment, ClientSet::single(0), m, wrong_n), InputError);

  ProtocolParams big_f = params_n4();
  big_f.f = 4;  // f+1 > n
  CHECK_THROWS_AS(estimate_detailed(deployment, ClientSet::single(0), m, big_f), InputError);
}

TEST_CASE("positive scaling of the matrix scales the latency") {
  std::mt19937 rng(5);
  for (int round = 0; round < 25; ++round) {
    const std::size_t k = 5 + rng() % 4;
    const RttMatrix m = random_matrix(k, rng);
    for (const double alpha : {0.25, 3.7, 1000.0}) {
      std::vector<double> scaled = m.values();
      for (double& v : scaled) v *= alpha;
      const RttMatrix ms = RttMatrix::from_values(k, std::move(scaled));

      const auto deployment = Deployment::leader_based(0, {1, 2, 3});
      const ClientSet clients({{static_cast<SiteId>(k - 1), 3}, {1, 2}});
      const double base = estimate_detailed(deployment, clients, m, params_n4()).latency_ms;
      const double big = estimate_detailed(deployment, clients, ms, params_n4()).latency_ms;
      CHECK(close_rel(big, alpha * base, 1e-12));

      const double sbase = estimate_simple(deployment, clients, m);
      const double sbig = estimate_simple(deployment, clients, ms);
      CHECK(close_rel(sbig, alpha * sbase, 1e-12));
    }
  }
}

TEST_CASE("raising any single rtt never lowers the latency") {
  std::mt19937 rng(6);
  for (int round = 0; round < 40; ++round) {
    const std::size_t k = 6;
    const RttMatrix m = random_matrix(k, rng);
    std::vector<SiteId> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto dep = Deployment::leader_based(ids[0], {ids[1], ids[2], ids[3]});
    const ClientSet clients({{ids[4], 2}, {ids[5], 1}});

    const double base = estimate_detailed(dep, clients, m, params_n4()).latency_ms;
    const double sbase = estimate_simple(dep, clients, m);

    const SiteId a = rng() % k;
    SiteId b = rng() % k;
    if (a == b) b = (b + 1) % k;
    std::vector<double> bumped = m.values();
    bumped[a * k + b] += 50.0;
    bumped[b * k + a] += 50.0;
    const RttMatrix mb = RttMatrix::from_values(k, std::move(bumped));

    CHECK(estimate_detailed(dep, clients, mb, params_n4()).latency_ms >= base);
    CHECK(estimate_simple(dep, clients, mb) >= sbase);
  }
}

TEST_CASE("consistent site relabeling leaves the latency unchanged") {
  std::mt19937 rng(7);
  for (int round = 0; round < 30; ++round) {
    const std::size_t k = 7;
    const RttMatrix m = random_matrix(k, rng);

    std::vector<SiteId> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> relabeled(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        relabeled[perm[a] * k + perm[b]] = m.values()[a * k + b];
      }
    }
    const RttMatrix mp = RttMatrix::from_values(k, std::move(relabeled));

    const auto dep = Deployment::leader_based(2, {0, 4, 6});
    const auto dep_p = Deployment::leader_based(perm[2], {perm[0], perm[4], perm[6]});
    const ClientSet clients({{1, 5}, {3, 1}});
    const ClientSet clients_p({{perm[1], 5}, {perm[3], 1}});

    const double a = estimate_detailed(dep, clients, m, params_n4()).latency_ms;
    const double b = estimate_detailed(dep_p, clients_p, mp, params_n4()).latency_ms;
    CHECK(close_rel(a, b, 1e-12));

    CHECK(close_rel(estimate_simple(dep, clients, m), estimate_simple(dep_p, clients_p, mp),
                    1e-12));
  }
}

// With n=4 the write/accept quorum is 3 while only the n-2 = 2 non-self,
// non-leader arrivals can undercut a replica's own chain, so the phase
// times are nondecreasing per replica even without the triangle
// inequality. Larger n needs metric matrices (see below).
TEST_CASE("causal monotonicity at n=4 on arbitrary matrices") {
  std::mt19937 rng(8);
  for (int round = 0; round < 60; ++round) {
    const std::size_t k = 4 + rng() % 5;
    const RttMatrix m = random_matrix(k, rng);
    std::vector<SiteId> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto dep = Deployment::leader_based(ids[0], {ids[1], ids[2], ids[3]});
    const ClientSet clients = ClientSet::single(ids[rng() % k]);

    const auto est = estimate_detailed(dep, clients, m, params_n4());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(est.trace.s_req <= est.trace.s_pro[i]);
      CHECK(est.trace.s_pro[i] <= est.trace.s_wrt[i]);
      CHECK(est.trace.s_wrt[i] <= est.trace.s_acc[i]);
    }
    for (const auto& [site, t] : est.trace.response) {
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t <= est.trace.s_acc[i] + link_delay(m, dep.replicas()[i], site) + 1e-9);
      }
    }
  }
}

TEST_CASE("causal monotonicity on metric matrices for n up to 9") {
  std::mt19937 rng(9);
  for (int round = 0; round < 40; ++round) {
    const std::size_t k = 9 + rng() % 3;
    const RttMatrix m = random_metric_matrix(k, rng);
    const std::uint32_t n = 4 + rng() % 6;
    std::vector<SiteId> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto dep =
        Deployment::leader_based(ids[0], std::vector<SiteId>(ids.begin() + 1, ids.begin() + n));
    ProtocolParams p;
    p.n = n;
    p.f = 1;
    const ClientSet clients = ClientSet::single(ids[rng() % k]);

    const auto est = estimate_detailed(dep, clients, m, p);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(est.trace.s_req <= est.trace.s_pro[i] + 1e-9);
      CHECK(est.trace.s_pro[i] <= est.trace.s_wrt[i] + 1e-9);
      CHECK(est.trace.s_wrt[i] <= est.trace.s_acc[i] + 1e-9);
    }
  }
}

TEST_CASE("accept timing readings differ on asymmetric geometry") {
  // Star-like geometry: the leader is far from one replica, which makes the
  // literal reading (receiver's own write time) diverge from the
  // sender-based reading.
  std::mt19937 rng(10);
  int differing = 0;
  for (int round = 0; round < 50; ++round) {
    const RttMatrix m = random_matrix(6, rng);
    const auto dep = Deployment::leader_based(0, {1, 2, 3});
    const ClientSet clients = ClientSet::single(4);

    ProtocolParams sender = params_n4();
    ProtocolParams literal = params_n4();
    literal.accept_timing = AcceptTiming::PaperLiteral;

    const double a = estimate_detailed(dep, clients, m, sender).latency_ms;
    const double b = estimate_detailed(dep, clients, m, literal).latency_ms;
    if (a != b) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("client multiplicity equals expanding the multiset") {
  std::mt19937 rng(12);
  const RttMatrix m = random_matrix(8, rng);
  const auto dep = Deployment::leader_based(1, {0, 3, 6});

  // 3 clients at site 2 and 1 at site 7 == weighted entries {2:3, 7:1}
  const ClientSet weighted({{2, 3}, {7, 1}});
  const double lat = estimate_detailed(dep, weighted, m, params_n4()).latency_ms;

  const ClientSet c2 = ClientSet::single(2);
  const ClientSet c7 = ClientSet::single(7);
  const double l2 = estimate_detailed(dep, c2, m, params_n4()).latency_ms;
  const double l7 = estimate_detailed(dep, c7, m, params_n4()).latency_ms;

  // s_req couples the clients, so per-client runs are not independent;
  // recompute with the shared request leg instead.
  ProtocolParams p = params_n4();
  const auto full = estimate_detailed(dep, weighted, m, p);
  double expected = 0.0;
  for (const auto& [site, t] : full.trace.response) {
    expected += (site == 2 ? 3.0 : 1.0) * t;
  }
  expected /= 4.0;
  CHECK(close_rel(lat, expected, 1e-12));

  // sanity: the weighted result lies between the two single-site runs
  CHECK(lat >= std::min(l2, l7) - 1e-9);
  CHECK(lat <= std::max(l2, l7) + 1e-9);
}

TEST_CASE("simple estimator counts unordered replica pairs") {
  // n=4 over distinct rtts: s_con must sum each unordered pair once.
  const std::size_t k = 4;
  std::vector<double> values(k * k, 0.0);
  double next = 2.0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      values[a * k + b] = next;
      values[b * k + a] = next;
      next += 2.0;
    }
  }
  const RttMatrix m = RttMatrix::from_values(k, std::move(values));
  const auto dep = Deployment::leader_based(0, {1, 2, 3});
  // pairs (0,1)..(2,3) have rtts 2,4,6,8,10,12 -> half sum = 21
  // s_req = 0 (client at leader); s_res = (0 + 1 + 2 + 3) / 4 = 1.5
  CHECK(estimate_simple(dep, ClientSet::single(0), m) == 21.0 + 1.5);
}
