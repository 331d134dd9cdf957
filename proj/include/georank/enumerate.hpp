#pragma once

#include <cstdint>
#include <functional>

#include "georank/core.hpp"

namespace georank {

/// C(n, k) as an exact 64-bit value; throws InputError on overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

class DeploymentCursor;

/// The candidate deployment space: every placement of n replicas on
/// distinct allowed sites. Leader-based deployments that share a site
/// combination but differ in leader are distinct candidates.
///
/// The canonical enumeration order is ascending leader id, then follower
/// sets in lexicographic order (leaderless: member sets in lexicographic
/// order). Deployment k is computable directly from k, so the space can be
/// split into disjoint index ranges for data-parallel evaluation.
class DeploymentSpace {
 public:
  /// `allowed` is the replica site candidate subset of the catalog; it is
  /// deduplicated and sorted. Requires |allowed| >= n and n >= 1.
  DeploymentSpace(SiteCatalog catalog, std::vector<SiteId> allowed, std::uint32_t n,
                  DeploymentMode mode = DeploymentMode::LeaderBased);

  /// Space over every catalog site.
  static DeploymentSpace over_all_sites(SiteCatalog catalog, std::uint32_t n,
                                        DeploymentMode mode = DeploymentMode::LeaderBased);

  const SiteCatalog& catalog() const { return catalog_; }
  const std::vector<SiteId>& allowed() const { return allowed_; }
  std::uint32_t n() const { return n_; }
  DeploymentMode mode() const { return mode_; }

  /// |DC|: |SC| * C(|SC|-1, n-1) leader-based, C(|SC|, n) leaderless.
  std::uint64_t count() const;

  /// Deployment at `index` in canonical order (unranking).
  Deployment at(std::uint64_t index) const;

  /// Cursor positioned at `start` in canonical order.
  DeploymentCursor cursor(std::uint64_t start = 0) const;

  /// Visits indices [begin, end) in canonical order.
  void for_each(std::uint64_t begin, std::uint64_t end,
                const std::function<void(std::uint64_t, const Deployment&)>& fn) const;

 private:
  SiteCatalog catalog_;
  std::vector<SiteId> allowed_;
  std::uint32_t n_;
  DeploymentMode mode_;
};

/// Streams deployments in canonical order without materializing the space.
class DeploymentCursor {
 public:
  DeploymentCursor(const DeploymentSpace& space, std::uint64_t start);

  /// Produces the next deployment; returns false when the space is
  /// exhausted. `out` is overwritten in place.
  bool next(Deployment& out);

 private:
  void load(std::uint64_t index);
  bool advance();

  const DeploymentSpace* space_;
  bool exhausted_ = false;
  std::size_t leader_pos_ = 0;           // index into allowed(); unused leaderless
  std::vector<std::uint32_t> selection_; // ascending positions into the follower pool
};

}  // namespace georank
