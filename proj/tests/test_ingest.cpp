#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "georank/ingest.hpp"
#include "test_util.hpp"

using namespace georank;
using test::random_matrix;

namespace {

std::vector<RttSample> samples_from(const std::string& body) {
  std::istringstream in("src,dst,timestamp,rtt_ms\n" + body);
  return parse_samples(in);
}

}  // namespace

TEST_CASE("parse_samples maps fields directly") {
  const auto samples = samples_from("Ireland,Singapore,1555343280,179.9\n");
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].src == "Ireland");
  CHECK(samples[0].dst == "Singapore");
  CHECK(samples[0].timestamp == 1555343280.0);
  CHECK(samples[0].rtt_ms == 179.9);
}

TEST_CASE("parse_samples edge cases") {
  CHECK(samples_from("").empty());

  const auto no_ts = samples_from("a,b,,5.0\n");
  REQUIRE(no_ts.size() == 1);
  CHECK(!no_ts[0].timestamp.has_value());

  CHECK_THROWS_WITH_AS(samples_from("Ireland,Ireland,1,1.0\n"),
                       doctest::Contains("line 2"), InputError);
  CHECK_THROWS_AS(samples_from("a,b,1\n"), InputError);          // missing field
  CHECK_THROWS_AS(samples_from("a,b,1,zero\n"), InputError);     // bad number
  CHECK_THROWS_AS(samples_from("a,b,1,-3.0\n"), InputError);     // nonpositive
  CHECK_THROWS_AS(samples_from("a,b,1,0\n"), InputError);

  std::istringstream bad_header("source,dest\n");
  CHECK_THROWS_AS(parse_samples(bad_header), InputError);
}

TEST_CASE("parse_samples keeps row order and line numbers") {
  const auto samples = samples_from("a,b,1,10\nb,a,2,12\na,b,3,11\n");
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].rtt_ms == 10.0);
  CHECK(samples[1].rtt_ms == 12.0);
  CHECK(samples[2].rtt_ms == 11.0);
}

TEST_CASE("aggregate pools both directions") {
  const SiteCatalog catalog({"a", "b"});
  std::vector<RttSample> samples{
      {"a", "b", std::nullopt, 100.0},
      {"b", "a", std::nullopt, 102.0},
  };
  const RttMatrix m = aggregate(samples, catalog);
  CHECK(m.rtt(0, 1) == 101.0);
  CHECK(m.rtt(1, 0) == 101.0);
  CHECK(m.rtt(0, 0) == 0.0);
}

TEST_CASE("aggregate single sample is the degenerate mean") {
  const SiteCatalog catalog({"Ireland", "Singapore"});
  const std::vector<RttSample> samples{{"Ireland", "Singapore", std::nullopt, 180.3}};
  const RttMatrix m = aggregate(samples, catalog);
  CHECK(m.rtt(0, 1) == 180.3);
}

TEST_CASE("aggregate reports every missing pair") {
  const SiteCatalog catalog({"a", "b", "c"});
  const std::vector<RttSample> samples{{"a", "b", std::nullopt, 10.0}};
  CHECK_THROWS_WITH_AS(aggregate(samples, catalog),
                       doctest::Contains("(a, c)"), InputError);
  try {
    aggregate(samples, catalog);
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(b, c)") != std::string::npos);
  }
}

TEST_CASE("aggregate output satisfies matrix invariants and ignores sample order") {
  std::mt19937 rng(11);
  const SiteCatalog catalog({"w", "x", "y", "z"});
  std::vector<RttSample> samples;
  std::uniform_real_distribution<double> dist(1.0, 200.0);
  for (SiteId a = 0; a < 4; ++a) {
    for (SiteId b = 0; b < 4; ++b) {
      if (a == b) continue;
      const int count = 1 + static_cast<int>(rng() % 5);
      for (int i = 0; i < count; ++i) {
        samples.push_back({catalog.name(a), catalog.name(b), std::nullopt, dist(rng)});
      }
    }
  }

  const RttMatrix base = aggregate(samples, catalog);  // from_values validated already
  for (int round = 0; round < 10; ++round) {
    std::shuffle(samples.begin(), samples.end(), rng);
    CHECK(aggregate(samples, catalog) == base);  // bit exact
  }
}

TEST_CASE("trimmed aggregation drops the extremes") {
  const SiteCatalog catalog({"a", "b"});
  std::vector<RttSample> samples;
  for (int v = 1; v <= 50; ++v) {
    samples.push_back({"a", "b", std::nullopt, static_cast<double>(v)});
  }
  AggregateOptions trimmed;
  trimmed.trimmed = true;
  // drop 1..5 and 46..50, mean of 6..45 = 25.5
  CHECK(aggregate(samples, catalog, trimmed).rtt(0, 1) == 25.5);
  CHECK(aggregate(samples, catalog).rtt(0, 1) == 25.5);  // plain mean of 1..50 coincides
}

TEST_CASE("matrix csv round trips bit exactly") {
  std::mt19937 rng(3);
  const SiteCatalog catalog({"Ireland", "NVirginia", "Sao Paulo", "Tokyo io"});
  const RttMatrix m = random_matrix(4, rng);

  std::ostringstream out;
  store_matrix(out, catalog, m);
  std::istringstream in(out.str());
  const auto [catalog2, m2] = load_matrix(in);

  CHECK(catalog2 == catalog);
  CHECK(m2 == m);

  std::ostringstream out2;
  store_matrix(out2, catalog2, m2);
  CHECK(out2.str() == out.str());
}

TEST_CASE("load_matrix accepts a small literal file") {
  std::istringstream in("site,a,b\na,0,100\nb,100,0\n");
  const auto [catalog, m] = load_matrix(in);
  CHECK(catalog.size() == 2);
  CHECK(catalog.name(0) == "a");
  CHECK(m.rtt(0, 1) == 100.0);
}

TEST_CASE("load_matrix rejects malformed input") {
  std::istringstream asym("site,a,b\na,0,100\nb,90,0\n");
  CHECK_THROWS_WITH_AS(load_matrix(asym), doctest::Contains("asymmetric"), InputError);

  std::istringstream nonsquare("site,a,b\na,0,100\n");
  CHECK_THROWS_AS(load_matrix(nonsquare), InputError);

  std::istringstream extra_row("site,a,b\na,0,100\nb,100,0\nc,1,2\n");
  CHECK_THROWS_AS(load_matrix(extra_row), InputError);

  std::istringstream dup("site,a,a\na,0,100\na,100,0\n");
  CHECK_THROWS_AS(load_matrix(dup), InputError);

  std::istringstream reordered("site,a,b\nb,0,100\na,100,0\n");
  CHECK_THROWS_AS(load_matrix(reordered), InputError);
}

TEST_CASE("load_matrix averages asymmetry within tolerance") {
  // relative difference ~5e-10, below the 1e-9 gate
  std::istringstream in("site,a,b\na,0,100.00000001\nb,100.000000015,0\n");
  const auto [catalog, m] = load_matrix(in);
  CHECK(m.rtt(0, 1) == m.rtt(1, 0));
  CHECK(m.rtt(0, 1) == doctest::Approx(100.0000000125).epsilon(1e-12));
}

TEST_CASE("catalog_from_samples sorts names") {
  const std::vector<RttSample> samples{
      {"z", "a", std::nullopt, 1.0},
      {"m", "z", std::nullopt, 1.0},
  };
  const SiteCatalog catalog = catalog_from_samples(samples);
  REQUIRE(catalog.size() == 3);
  CHECK(catalog.name(0) == "a");
  CHECK(catalog.name(1) == "m");
  CHECK(catalog.name(2) == "z");
}
