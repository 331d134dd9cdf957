#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace georank {

using SiteId = std::uint32_t;

/// Invalid user-supplied input (bad files, bad flags, violated
/// preconditions originating outside the library). Maps to exit code 1
/// in the CLI; anything else that escapes is an internal error (exit 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A location (cloud region, data center) that can host a replica or a
/// client. Ids are positional within one catalog.
struct Site {
  SiteId id;
  std::string name;

  bool operator==(const Site&) const = default;
};

/// Ordered list of sites; a site's id equals its index in the list.
class SiteCatalog {
 public:
  SiteCatalog() = default;
  explicit SiteCatalog(std::vector<std::string> names);

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const Site& site(SiteId id) const;
  const std::string& name(SiteId id) const { return site(id).name; }
  const std::vector<Site>& sites() const { return sites_; }

  std::optional<SiteId> find(std::string_view name) const;
  /// Lookup that throws InputError for unknown names.
  SiteId require(std::string_view name) const;

  bool operator==(const SiteCatalog& other) const { return sites_ == other.sites_; }

 private:
  std::vector<Site> sites_;
  std::map<std::string, SiteId, std::less<>> by_name_;
};

/// Square symmetric matrix of mean round-trip times in milliseconds.
/// The diagonal is zero; off-diagonal entries are finite and positive.
class RttMatrix {
 public:
  RttMatrix() = default;

  /// Validating factory; throws InputError on the first violated invariant.
  static RttMatrix from_values(std::size_t size, std::vector<double> values);

  /// No validation. For staging values that validate_inputs() re-checks
  /// and for degenerate test matrices (e.g. all-zero).
  static RttMatrix unchecked(std::size_t size, std::vector<double> values);

  std::size_t size() const { return size_; }
  double rtt(SiteId a, SiteId b) const;
  const std::vector<double>& values() const { return values_; }

  bool operator==(const RttMatrix&) const = default;

 private:
  RttMatrix(std::size_t size, std::vector<double> values)
      : size_(size), values_(std::move(values)) {}

  std::size_t size_ = 0;
  std::vector<double> values_;  // row-major, size_ * size_
};

/// One-way message transmission delay: RTT(a, b) / 2. Zero when a == b.
/// Throws std::out_of_range for invalid indices.
double link_delay(const RttMatrix& m, SiteId a, SiteId b);

enum class DeploymentMode { LeaderBased, Leaderless };

/// A replica placement in canonical form. Leader-based deployments store
/// the leader first followed by the followers sorted ascending; leaderless
/// deployments store all member sites sorted ascending. Two deployments
/// built from any permutation of the same sites compare equal.
class Deployment {
 public:
  static Deployment leader_based(SiteId leader, std::vector<SiteId> followers);
  static Deployment leaderless(std::vector<SiteId> members);

  DeploymentMode mode() const { return mode_; }
  std::size_t size() const { return sites_.size(); }

  /// Leader-based only; throws InputError otherwise.
  SiteId leader() const;
  /// Leader-based only: the n-1 follower sites, ascending.
  std::span<const SiteId> followers() const;

  /// All replica sites; index 0 is the leader in leader-based mode.
  const std::vector<SiteId>& replicas() const { return sites_; }

  /// Canonical identity: "Leader|F1,F2,F3" (leader-based, followers
  /// ascending by name order of their ids) or "S1,S2,S3" (leaderless).
  std::string to_string(const SiteCatalog& catalog) const;
  static Deployment parse(std::string_view text, const SiteCatalog& catalog);

  bool operator==(const Deployment&) const = default;
  /// Canonical order: ascending leader id, then lexicographic follower sets.
  auto operator<=>(const Deployment&) const = default;

 private:
  friend class DeploymentCursor;

  Deployment(DeploymentMode mode, std::vector<SiteId> sites)
      : mode_(mode), sites_(std::move(sites)) {}

  DeploymentMode mode_ = DeploymentMode::LeaderBased;
  std::vector<SiteId> sites_;
};

struct ClientEntry {
  SiteId site;
  std::uint32_t count;

  bool operator==(const ClientEntry&) const = default;
};

/// Client locations with multiplicities, e.g. ten clients in one region
/// and three in another.
class ClientSet {
 public:
  /// Throws InputError on duplicate sites, zero counts, or an empty set.
  explicit ClientSet(std::vector<ClientEntry> entries);

  static ClientSet single(SiteId site) { return ClientSet({{site, 1}}); }

  /// Parses "name:count,name:count"; a bare name means count 1.
  static ClientSet parse(std::string_view spec, const SiteCatalog& catalog);

  const std::vector<ClientEntry>& entries() const { return entries_; }
  std::uint64_t total_count() const { return total_; }

 private:
  std::vector<ClientEntry> entries_;
  std::uint64_t total_ = 0;
};

enum class FaultModel { Bft, Cft };
enum class EstimatorVariant { ModSmartDetailed, ModSmartSimple };

/// Which progress time an Accept message carries from its sender. The
/// sender-based reading mirrors the Write round; the literal reading uses
/// the receiver's own Write-acceptance time.
enum class AcceptTiming { SenderBased, PaperLiteral };

struct ProtocolParams {
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  FaultModel fault_model = FaultModel::Bft;
  EstimatorVariant variant = EstimatorVariant::ModSmartDetailed;
  AcceptTiming accept_timing = AcceptTiming::SenderBased;

  /// Majority quorum per phase: ceil((n + 1) / 2).
  std::uint32_t quorum() const { return (n + 2) / 2; }

  /// 3f+1 replicas tolerate f Byzantine faults; 2f+1 tolerate f crashes.
  std::uint32_t min_replicas() const {
    return fault_model == FaultModel::Bft ? 3 * f + 1 : 2 * f + 1;
  }
};

/// Collects every invariant violation across the shared inputs instead of
/// stopping at the first. Empty result means the inputs are consistent.
std::vector<std::string> validate_inputs(const SiteCatalog& catalog,
                                         const RttMatrix& m,
                                         const ClientSet& clients,
                                         const ProtocolParams& params);

}  // namespace georank
