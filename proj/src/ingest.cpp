#include "georank/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "georank/csv.hpp"

namespace georank {

namespace {

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

std::vector<RttSample> parse_samples(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || blank_record(fields)) {
    throw InputError("sample csv is empty; expected header 'src,dst,timestamp,rtt_ms'");
  }
  if (fields != std::vector<std::string>{"src", "dst", "timestamp", "rtt_ms"}) {
    throw InputError("line 1: expected header 'src,dst,timestamp,rtt_ms'");
  }

  std::vector<RttSample> samples;
  while (reader.next(fields)) {
    if (blank_record(fields)) continue;
    const std::size_t line = reader.line();
    if (fields.size() != 4) {
      throw InputError("line " + std::to_string(line) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    }
    RttSample s;
    s.src = fields[0];
    s.dst = fields[1];
    if (s.src.empty() || s.dst.empty()) {
      throw InputError("line " + std::to_string(line) + ": src and dst must be non-empty");
    }
    if (s.src == s.dst) {
      throw InputError("line " + std::to_string(line) + ": src and dst are both '" + s.src + "'");
    }
    if (!fields[2].empty()) {
      s.timestamp = csv::parse_double(fields[2], line, "timestamp");
    }
    s.rtt_ms = csv::parse_double(fields[3], line, "rtt_ms");
    if (!std::isfinite(s.rtt_ms) || s.rtt_ms <= 0.0) {
      throw InputError("line " + std::to_string(line) + ": rtt_ms must be finite and positive");
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

SiteCatalog catalog_from_samples(const std::vector<RttSample>& samples) {
  std::set<std::string> names;
  for (const auto& s : samples) {
    names.insert(s.src);
    names.insert(s.dst);
  }
  return SiteCatalog(std::vector<std::string>(names.begin(), names.end()));
}

RttMatrix aggregate(const std::vector<RttSample>& samples, const SiteCatalog& catalog,
                    const AggregateOptions& options) {
  const std::size_t k = catalog.size();
  // pooled values per unordered pair (a < b)
  std::map<std::pair<SiteId, SiteId>, std::vector<double>> pooled;
  for (const auto& s : samples) {
    const SiteId a = catalog.require(s.src);
    const SiteId b = catalog.require(s.dst);
    pooled[{std::min(a, b), std::max(a, b)}].push_back(s.rtt_ms);
  }

  std::string missing;
  for (SiteId a = 0; a < k; ++a) {
    for (SiteId b = a + 1; b < k; ++b) {
      if (!pooled.contains({a, b})) {
        if (!missing.empty()) missing += ", ";
        missing += "(" + catalog.name(a) + ", " + catalog.name(b) + ")";
      }
    }
  }
  if (!missing.empty()) {
    throw InputError("no rtt samples for site pairs: " + missing);
  }

  std::vector<double> values(k * k, 0.0);
  for (auto& [pair, rtts] : pooled) {
    // Sorting makes the mean independent of sample order and positions the
    // extremes for trimming.
    std::sort(rtts.begin(), rtts.end());
    std::size_t lo = 0, hi = rtts.size();
    if (options.trimmed) {
      const std::size_t drop = rtts.size() / 10;
      if (rtts.size() > 2 * drop) {
        lo += drop;
        hi -= drop;
      }
    }
    const double sum = std::accumulate(rtts.begin() + lo, rtts.begin() + hi, 0.0);
    const double mean = sum / static_cast<double>(hi - lo);
    values[static_cast<std::size_t>(pair.first) * k + pair.second] = mean;
    values[static_cast<std::size_t>(pair.second) * k + pair.first] = mean;
  }
  return RttMatrix::from_values(k, std::move(values));
}

void store_matrix(std::ostream& out, const SiteCatalog& catalog, const RttMatrix& m) {
  if (catalog.size() != m.size()) {
    throw InputError("catalog size " + std::to_string(catalog.size()) +
                     " does not match matrix size " + std::to_string(m.size()));
  }
  std::vector<std::string> row;
  row.push_back("site");
  for (const auto& site : catalog.sites()) row.push_back(site.name);
  csv::write_row(out, row);

  for (SiteId a = 0; a < catalog.size(); ++a) {
    row.clear();
    row.push_back(catalog.name(a));
    for (SiteId b = 0; b < catalog.size(); ++b) {
      row.push_back(csv::format_double(m.rtt(a, b)));
    }
    csv::write_row(out, row);
  }
}

std::pair<SiteCatalog, RttMatrix> load_matrix(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || blank_record(fields)) {
    throw InputError("matrix csv is empty; expected header 'site,<name1>,...'");
  }
  if (fields.size() < 2 || fields[0] != "site") {
    throw InputError("line 1: expected header 'site,<name1>,...'");
  }
  const std::vector<std::string> names(fields.begin() + 1, fields.end());
  const std::size_t k = names.size();
  SiteCatalog catalog{names};  // rejects duplicates and empty names

  std::vector<double> values(k * k, 0.0);
  std::size_t rows = 0;
  while (reader.next(fields)) {
    if (blank_record(fields)) continue;
    const std::size_t line = reader.line();
    if (rows >= k) {
      throw InputError("line " + std::to_string(line) + ": matrix is not square (more than " +
                       std::to_string(k) + " rows)");
    }
    if (fields.size() != k + 1) {
      throw InputError("line " + std::to_string(line) + ": expected " + std::to_string(k + 1) +
                       " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0] != names[rows]) {
      throw InputError("line " + std::to_string(line) + ": row name '" + fields[0] +
                       "' does not match column order ('" + names[rows] + "' expected)");
    }
    for (std::size_t b = 0; b < k; ++b) {
      values[rows * k + b] = csv::parse_double(fields[b + 1], line, "rtt value");
    }
    ++rows;
  }
  if (rows != k) {
    throw InputError("matrix is not square: " + std::to_string(rows) + " rows for " +
                     std::to_string(k) + " columns");
  }

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double ab = values[a * k + b];
      const double ba = values[b * k + a];
      const double scale = std::max(std::abs(ab), std::abs(ba));
      if (std::abs(ab - ba) > 1e-9 * scale) {
        throw InputError("matrix entries (" + names[a] + ", " + names[b] +
                         ") are asymmetric beyond 1e-9 relative");
      }
      if (ab != ba) {
        const double mean = (ab + ba) / 2.0;
        values[a * k + b] = mean;
        values[b * k + a] = mean;
      }
    }
  }

  auto matrix = RttMatrix::from_values(k, std::move(values));
  return {std::move(catalog), std::move(matrix)};
}

}  // namespace georank
