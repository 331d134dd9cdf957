#include "georank/ranking.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "georank/csv.hpp"
#include "georank/estimator.hpp"

namespace georank {

Ranking::Ranking(SiteCatalog catalog, std::vector<std::pair<Deployment, double>> latencies)
    : catalog_(std::move(catalog)) {
  if (latencies.empty()) throw InputError("ranking has no deployments");

  std::sort(latencies.begin(), latencies.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });

  entries_.reserve(latencies.size());
  std::uint32_t rank = 1;
  for (auto& [deployment, latency] : latencies) {
    entries_.push_back(RankingEntry{std::move(deployment), latency, rank++});
  }

  std::vector<const Deployment*> sorted;
  sorted.reserve(entries_.size());
  for (const auto& e : entries_) sorted.push_back(&e.deployment);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i] == *sorted[i - 1]) {
      throw InputError("duplicate deployment in ranking: " + sorted[i]->to_string(catalog_));
    }
  }
}

Ranking rank(const DeploymentSpace& space, const ClientSet& clients, const RttMatrix& m,
             const ProtocolParams& params, EstimatorVariant estimator, unsigned workers,
             RankTimings* timings) {
  const std::uint64_t count = space.count();
  if (count == 0) throw InputError("deployment space is empty");

  auto evaluate = [&](const Deployment& d) {
    return estimator == EstimatorVariant::ModSmartDetailed
               ? estimate_detailed(d, clients, m, params).latency_ms
               : estimate_simple(d, clients, m);
  };

  const auto eval_start = std::chrono::steady_clock::now();
  std::vector<double> latencies(count);

  workers = std::max(1u, workers);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    try {
      space.for_each(begin, end, [&](std::uint64_t index, const Deployment& d) {
        latencies[index] = evaluate(d);
      });
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    run_range(0, count);
  } else {
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(count, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  const auto eval_end = std::chrono::steady_clock::now();

  std::vector<std::pair<Deployment, double>> pairs;
  pairs.reserve(count);
  space.for_each(0, count, [&](std::uint64_t index, const Deployment& d) {
    pairs.emplace_back(d, latencies[index]);
  });
  Ranking ranking(space.catalog(), std::move(pairs));
  const auto sort_end = std::chrono::steady_clock::now();

  if (timings) {
    timings->evaluate_seconds = std::chrono::duration<double>(eval_end - eval_start).count();
    timings->sort_seconds = std::chrono::duration<double>(sort_end - eval_end).count();
  }
  return ranking;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError("correlation requires series of equal length");
  }
  if (x.empty()) throw InputError("correlation of empty series");
  if (x.size() == 1) return 1.0;

  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

RankingComparison compare(const Ranking& estimated, const Ranking& reference) {
  std::map<std::string, std::uint32_t> ref_ranks;
  for (const auto& e : reference.entries()) {
    ref_ranks.emplace(e.deployment.to_string(reference.catalog()), e.rank);
  }

  std::vector<std::string> missing_in_ref;
  std::set<std::string> seen;
  RankingComparison out;
  out.pairs.reserve(estimated.size());
  for (const auto& e : estimated.entries()) {
    std::string id = e.deployment.to_string(estimated.catalog());
    auto it = ref_ranks.find(id);
    if (it == ref_ranks.end()) {
      missing_in_ref.push_back(std::move(id));
      continue;
    }
    seen.insert(id);
    out.pairs.push_back(RankPair{std::move(id), e.rank, it->second});
  }

  std::vector<std::string> missing_in_est;
  for (const auto& [id, r] : ref_ranks) {
    if (!seen.contains(id)) missing_in_est.push_back(id);
  }
  if (!missing_in_ref.empty() || !missing_in_est.empty()) {
    std::string msg = "rankings cover different deployment sets;";
    std::size_t shown = 0;
    for (const auto& id : missing_in_ref) {
      if (shown++ >= 10) break;
      msg += " only-estimated: " + id + ";";
    }
    for (const auto& id : missing_in_est) {
      if (shown++ >= 10) break;
      msg += " only-reference: " + id + ";";
    }
    throw InputError(msg);
  }

  double sum_sq = 0.0;
  std::vector<double> est_ranks, got_ranks;
  est_ranks.reserve(out.pairs.size());
  got_ranks.reserve(out.pairs.size());
  for (const auto& p : out.pairs) {
    const double diff =
        static_cast<double>(p.rank_estimated) - static_cast<double>(p.rank_reference);
    sum_sq += diff * diff;
    est_ranks.push_back(static_cast<double>(p.rank_estimated));
    got_ranks.push_back(static_cast<double>(p.rank_reference));
  }
  out.rmse = std::sqrt(sum_sq / static_cast<double>(out.pairs.size()));
  out.cc = pearson(est_ranks, got_ranks);
  return out;
}

void store_ranking(std::ostream& out, const Ranking& ranking) {
  csv::write_row(out, {"rank", "leader", "followers", "latency_ms"});
  std::vector<std::string> row(4);
  for (const auto& e : ranking.entries()) {
    row[0] = std::to_string(e.rank);
    std::span<const SiteId> tail;
    if (e.deployment.mode() == DeploymentMode::LeaderBased) {
      row[1] = ranking.catalog().name(e.deployment.leader());
      tail = e.deployment.followers();
    } else {
      row[1].clear();
      tail = e.deployment.replicas();
    }
    row[2].clear();
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (i > 0) row[2] += ';';
      row[2] += ranking.catalog().name(tail[i]);
    }
    row[3] = csv::format_double(e.latency_ms);
    csv::write_row(out, row);
  }
}

namespace {

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

std::vector<std::string> split(std::string_view text, char delim) {
  std::vector<std::string> parts;
  while (true) {
    const auto pos = text.find(delim);
    parts.emplace_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

void collect_names(std::string_view deployment, std::set<std::string>& names) {
  for (auto part : split(deployment, '|')) {
    for (auto& name : split(part, ',')) {
      if (!name.empty()) names.insert(std::move(name));
    }
  }
}

}  // namespace

Ranking load_reference(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  do {
    if (!reader.next(header)) {
      throw InputError("reference csv is empty");
    }
  } while (blank_record(header));

  enum class Mode { RankingCsv, PreAggregated, RawSamples };
  Mode mode;
  if (header == std::vector<std::string>{"rank", "leader", "followers", "latency_ms"}) {
    mode = Mode::RankingCsv;
  } else if (!header.empty() && header[0] == "deployment") {
    const std::size_t cols = header.size() - 1;
    if (cols == 1) {
      mode = Mode::PreAggregated;
    } else if (cols == 50) {
      mode = Mode::RawSamples;
    } else {
      throw InputError("line 1: raw reference files need exactly 50 sample columns, got " +
                       std::to_string(cols));
    }
  } else {
    throw InputError(
        "line 1: expected 'rank,leader,followers,latency_ms', 'deployment,latency_ms', or "
        "'deployment,<50 sample columns>'");
  }

  struct Row {
    std::string deployment;  // canonical identity
    double latency;
  };
  std::vector<Row> rows;
  std::set<std::string> names;

  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (blank_record(fields)) continue;
    const std::size_t line = reader.line();
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Row row;
    if (mode == Mode::RankingCsv) {
      csv::parse_uint(fields[0], line, "rank");
      const std::string& leader = fields[1];
      std::string followers = fields[2];
      std::replace(followers.begin(), followers.end(), ';', ',');
      row.deployment = leader.empty() ? followers : leader + "|" + followers;
      row.latency = csv::parse_double(fields[3], line, "latency_ms");
    } else if (mode == Mode::PreAggregated) {
      row.deployment = fields[0];
      row.latency = csv::parse_double(fields[1], line, "latency_ms");
    } else {
      row.deployment = fields[0];
      std::vector<double> samples;
      samples.reserve(50);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        samples.push_back(csv::parse_double(fields[i], line, "sample"));
      }
      // Trim rule: highest five and lowest five are outliers; average the
      // middle 40.
      std::sort(samples.begin(), samples.end());
      double sum = 0.0;
      for (std::size_t i = 5; i < 45; ++i) sum += samples[i];
      row.latency = sum / 40.0;
    }
    collect_names(row.deployment, names);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("reference csv has no deployment rows");

  SiteCatalog catalog{std::vector<std::string>(names.begin(), names.end())};
  std::vector<std::pair<Deployment, double>> pairs;
  pairs.reserve(rows.size());
  std::set<std::string> seen;
  for (const auto& row : rows) {
    Deployment d = Deployment::parse(row.deployment, catalog);
    if (!seen.insert(d.to_string(catalog)).second) {
      throw InputError("duplicate deployment row '" + row.deployment + "'");
    }
    pairs.emplace_back(std::move(d), row.latency);
  }
  return Ranking(std::move(catalog), std::move(pairs));
}

void store_scatter(std::ostream& out, const RankingComparison& comparison) {
  csv::write_row(out, {"deployment", "rank_estimated", "rank_reference"});
  std::vector<std::string> row(3);
  for (const auto& p : comparison.pairs) {
    row[0] = p.deployment;
    row[1] = std::to_string(p.rank_estimated);
    row[2] = std::to_string(p.rank_reference);
    csv::write_row(out, row);
  }
}

}  // namespace georank
