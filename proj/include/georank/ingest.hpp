#pragma once

#include <iosfwd>
#include <optional>
#include <utility>

#include "georank/core.hpp"

namespace georank {

/// One round-trip measurement between two named sites.
struct RttSample {
  std::string src;
  std::string dst;
  std::optional<double> timestamp;  // seconds since epoch
  double rtt_ms = 0.0;
};

/// Parses sample CSV (header "src,dst,timestamp,rtt_ms"; timestamp may be
/// empty). Row order is preserved. Malformed rows raise InputError with
/// the line number; unknown site names are resolved later at aggregation.
std::vector<RttSample> parse_samples(std::istream& in);

struct AggregateOptions {
  /// Drop the top and bottom 10% of the pooled samples of each pair
  /// before averaging. Off by default: rankings are built from plain
  /// mean RTTs.
  bool trimmed = false;
};

/// Mean RTT per unordered site pair, both directions pooled, diagonal zero.
/// Every pair of catalog sites needs at least one sample in some direction;
/// missing pairs raise one InputError listing all of them.
RttMatrix aggregate(const std::vector<RttSample>& samples, const SiteCatalog& catalog,
                    const AggregateOptions& options = {});

/// Catalog of every site name appearing in the samples, sorted by name.
SiteCatalog catalog_from_samples(const std::vector<RttSample>& samples);

/// Matrix CSV: header "site,<name1>,<name2>,..."; one row per site. Values
/// are written in shortest round-trip form, so load(store(x)) == x exactly.
void store_matrix(std::ostream& out, const SiteCatalog& catalog, const RttMatrix& m);

/// Inverse of store_matrix. Rejects non-square input, duplicate names, and
/// relative asymmetry beyond 1e-9; smaller asymmetry is averaged away.
std::pair<SiteCatalog, RttMatrix> load_matrix(std::istream& in);

}  // namespace georank
