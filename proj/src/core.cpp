#include "georank/core.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <sstream>

namespace georank {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

SiteCatalog::SiteCatalog(std::vector<std::string> names) {
  sites_.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string& name = names[i];
    if (name.empty()) {
      throw InputError("site " + std::to_string(i) + " has an empty name");
    }
    if (name.find_first_of(",;|\"\r\n") != std::string::npos) {
      throw InputError("site name '" + name + "' contains a reserved character (,;|\" or newline)");
    }
    auto [it, inserted] = by_name_.emplace(name, static_cast<SiteId>(i));
    if (!inserted) {
      throw InputError("duplicate site name '" + name + "'");
    }
    sites_.push_back(Site{static_cast<SiteId>(i), std::move(name)});
  }
}

const Site& SiteCatalog::site(SiteId id) const {
  if (id >= sites_.size()) {
    throw std::out_of_range("site id " + std::to_string(id) + " out of range (catalog has " +
                            std::to_string(sites_.size()) + " sites)");
  }
  return sites_[id];
}

std::optional<SiteId> SiteCatalog::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

SiteId SiteCatalog::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw InputError("unknown site name '" + std::string(name) + "'");
  return *id;
}

RttMatrix RttMatrix::from_values(std::size_t size, std::vector<double> values) {
  if (values.size() != size * size) {
    throw InputError("rtt matrix value count " + std::to_string(values.size()) +
                     " does not match size " + std::to_string(size) + "x" + std::to_string(size));
  }
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      const double v = values[a * size + b];
      if (a == b) {
        if (v != 0.0) {
          throw InputError("rtt matrix diagonal entry [" + std::to_string(a) + "][" +
                           std::to_string(a) + "] is " + std::to_string(v) + ", expected 0");
        }
        continue;
      }
      if (!std::isfinite(v) || v <= 0.0) {
        throw InputError("rtt matrix entry [" + std::to_string(a) + "][" + std::to_string(b) +
                         "] must be finite and positive");
      }
      if (a < b && v != values[b * size + a]) {
        throw InputError("rtt matrix is asymmetric between [" + std::to_string(a) + "][" +
                         std::to_string(b) + "] and [" + std::to_string(b) + "][" +
                         std::to_string(a) + "]");
      }
    }
  }
  return RttMatrix(size, std::move(values));
}

RttMatrix RttMatrix::unchecked(std::size_t size, std::vector<double> values) {
  if (values.size() != size * size) {
    throw InputError("rtt matrix value count " + std::to_string(values.size()) +
                     " does not match size " + std::to_string(size) + "x" + std::to_string(size));
  }
  return RttMatrix(size, std::move(values));
}

double RttMatrix::rtt(SiteId a, SiteId b) const {
  if (a >= size_ || b >= size_) {
    throw std::out_of_range("rtt index (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") out of range for " + std::to_string(size_) + " sites");
  }
  return values_[static_cast<std::size_t>(a) * size_ + b];
}

double link_delay(const RttMatrix& m, SiteId a, SiteId b) {
  if (a == b) {
    if (a >= m.size()) {
      throw std::out_of_range("site id " + std::to_string(a) + " out of range");
    }
    return 0.0;
  }
  return m.rtt(a, b) / 2.0;
}

Deployment Deployment::leader_based(SiteId leader, std::vector<SiteId> followers) {
  std::sort(followers.begin(), followers.end());
  if (std::adjacent_find(followers.begin(), followers.end()) != followers.end()) {
    throw InputError("deployment has duplicate follower sites");
  }
  if (std::binary_search(followers.begin(), followers.end(), leader)) {
    throw InputError("deployment leader also appears as a follower");
  }
  std::vector<SiteId> sites;
  sites.reserve(followers.size() + 1);
  sites.push_back(leader);
  sites.insert(sites.end(), followers.begin(), followers.end());
  return Deployment(DeploymentMode::LeaderBased, std::move(sites));
}

Deployment Deployment::leaderless(std::vector<SiteId> members) {
  if (members.empty()) throw InputError("deployment must contain at least one site");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw InputError("deployment has duplicate sites");
  }
  return Deployment(DeploymentMode::Leaderless, std::move(members));
}

SiteId Deployment::leader() const {
  if (mode_ != DeploymentMode::LeaderBased) {
    throw InputError("leaderless deployment has no leader");
  }
  return sites_.front();
}

std::span<const SiteId> Deployment::followers() const {
  if (mode_ != DeploymentMode::LeaderBased) {
    throw InputError("leaderless deployment has no follower set");
  }
  return {sites_.data() + 1, sites_.size() - 1};
}

std::string Deployment::to_string(const SiteCatalog& catalog) const {
  std::string out;
  if (mode_ == DeploymentMode::LeaderBased) {
    out += catalog.name(sites_.front());
    out += '|';
    for (std::size_t i = 1; i < sites_.size(); ++i) {
      if (i > 1) out += ',';
      out += catalog.name(sites_[i]);
    }
  } else {
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (i > 0) out += ',';
      out += catalog.name(sites_[i]);
    }
  }
  return out;
}

Deployment Deployment::parse(std::string_view text, const SiteCatalog& catalog) {
  const auto bar = text.find('|');
  auto parse_list = [&](std::string_view list) {
    std::vector<SiteId> ids;
    while (!list.empty()) {
      const auto comma = list.find(',');
      std::string_view token = trim(list.substr(0, comma));
      if (token.empty()) throw InputError("deployment '" + std::string(text) + "' has an empty site name");
      ids.push_back(catalog.require(token));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    return ids;
  };
  if (bar == std::string_view::npos) {
    auto members = parse_list(text);
    if (members.empty()) throw InputError("deployment string is empty");
    return leaderless(std::move(members));
  }
  const SiteId leader = catalog.require(trim(text.substr(0, bar)));
  auto followers = parse_list(text.substr(bar + 1));
  return leader_based(leader, std::move(followers));
}

ClientSet::ClientSet(std::vector<ClientEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw InputError("client set must contain at least one client");
  }
  std::vector<SiteId> seen;
  for (const auto& e : entries_) {
    if (e.count == 0) {
      throw InputError("client count for site " + std::to_string(e.site) + " must be >= 1");
    }
    seen.push_back(e.site);
    total_ += e.count;
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw InputError("client set lists the same site more than once");
  }
}

ClientSet ClientSet::parse(std::string_view spec, const SiteCatalog& catalog) {
  std::vector<ClientEntry> entries;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    std::string_view token = trim(spec.substr(0, comma));
    if (!token.empty()) {
      std::uint32_t count = 1;
      std::string_view name = token;
      if (const auto colon = token.rfind(':'); colon != std::string_view::npos) {
        name = trim(token.substr(0, colon));
        std::string_view count_text = trim(token.substr(colon + 1));
        auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count == 0) {
          throw InputError("invalid client count '" + std::string(count_text) + "' in '" +
                           std::string(token) + "'");
        }
      }
      entries.push_back(ClientEntry{catalog.require(name), count});
    }
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return ClientSet(std::move(entries));
}

std::vector<std::string> validate_inputs(const SiteCatalog& catalog, const RttMatrix& m,
                                         const ClientSet& clients, const ProtocolParams& params) {
  std::vector<std::string> errors;
  auto add = [&errors](std::string msg) { errors.push_back(std::move(msg)); };

  if (catalog.empty()) add("site catalog is empty");

  if (m.size() != catalog.size()) {
    add("rtt matrix is " + std::to_string(m.size()) + "x" + std::to_string(m.size()) +
        " but the catalog has " + std::to_string(catalog.size()) + " sites");
  }
  const std::size_t k = m.size();
  const auto& values = m.values();
  for (std::size_t a = 0; a < k; ++a) {
    if (values[a * k + a] != 0.0) {
      add("rtt matrix diagonal entry [" + std::to_string(a) + "][" + std::to_string(a) +
          "] is nonzero");
    }
    for (std::size_t b = a + 1; b < k; ++b) {
      const double ab = values[a * k + b];
      const double ba = values[b * k + a];
      if (!std::isfinite(ab) || ab <= 0.0) {
        add("rtt matrix entry [" + std::to_string(a) + "][" + std::to_string(b) +
            "] must be finite and positive");
      }
      if (ab != ba) {
        add("rtt matrix entry [" + std::to_string(a) + "][" + std::to_string(b) +
            "] differs from [" + std::to_string(b) + "][" + std::to_string(a) + "]");
      }
    }
  }

  for (const auto& e : clients.entries()) {
    if (e.site >= catalog.size()) {
      add("client site id " + std::to_string(e.site) + " is out of range (catalog has " +
          std::to_string(catalog.size()) + " sites)");
    }
    if (e.count == 0) {
      add("client count for site " + std::to_string(e.site) + " must be >= 1");
    }
  }
  if (clients.total_count() == 0) add("client set is empty");

  if (params.f < 1) {
    add("f must be >= 1");
  } else if (params.n < params.min_replicas()) {
    const char* bound = params.fault_model == FaultModel::Bft ? "3f+1" : "2f+1";
    add("n=" + std::to_string(params.n) + " with f=" + std::to_string(params.f) +
        " violates n >= " + bound);
  }
  if (params.n > catalog.size()) {
    add("n=" + std::to_string(params.n) + " exceeds the catalog size " +
        std::to_string(catalog.size()));
  }

  return errors;
}

}  // namespace georank
