#include "georank/enumerate.hpp"

#include <algorithm>
#include <limits>

namespace georank {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;  // exact: C(n-k+i, i) is an integer
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw InputError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                       ") exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

namespace {

/// Lexicographic unranking of the `rank`-th t-subset of {0, ..., m-1}.
std::vector<std::uint32_t> unrank_combination(std::uint64_t rank, std::uint32_t m, std::uint32_t t) {
  std::vector<std::uint32_t> out;
  out.reserve(t);
  std::uint32_t candidate = 0;
  for (std::uint32_t slot = 0; slot < t; ++slot) {
    while (true) {
      const std::uint64_t with_candidate = binomial(m - candidate - 1, t - slot - 1);
      if (rank < with_candidate) {
        out.push_back(candidate++);
        break;
      }
      rank -= with_candidate;
      ++candidate;
    }
  }
  return out;
}

}  // namespace

DeploymentSpace::DeploymentSpace(SiteCatalog catalog, std::vector<SiteId> allowed, std::uint32_t n,
                                 DeploymentMode mode)
    : catalog_(std::move(catalog)), allowed_(std::move(allowed)), n_(n), mode_(mode) {
  if (n_ == 0) throw InputError("replica count n must be >= 1");
  std::sort(allowed_.begin(), allowed_.end());
  allowed_.erase(std::unique(allowed_.begin(), allowed_.end()), allowed_.end());
  if (allowed_.empty()) throw InputError("candidate site set is empty");
  if (allowed_.back() >= catalog_.size()) {
    throw InputError("candidate site id " + std::to_string(allowed_.back()) +
                     " is out of range (catalog has " + std::to_string(catalog_.size()) +
                     " sites)");
  }
  if (allowed_.size() < n_) {
    throw InputError("cannot place " + std::to_string(n_) + " replicas on " +
                     std::to_string(allowed_.size()) + " candidate sites");
  }
}

DeploymentSpace DeploymentSpace::over_all_sites(SiteCatalog catalog, std::uint32_t n,
                                                DeploymentMode mode) {
  std::vector<SiteId> all(catalog.size());
  for (SiteId i = 0; i < all.size(); ++i) all[i] = i;
  return DeploymentSpace(std::move(catalog), std::move(all), n, mode);
}

std::uint64_t DeploymentSpace::count() const {
  const std::uint64_t a = allowed_.size();
  if (mode_ == DeploymentMode::Leaderless) {
    return binomial(a, n_);
  }
  return a * binomial(a - 1, n_ - 1);
}

Deployment DeploymentSpace::at(std::uint64_t index) const {
  if (index >= count()) {
    throw std::out_of_range("deployment index " + std::to_string(index) +
                            " out of range (space has " + std::to_string(count()) + ")");
  }
  if (mode_ == DeploymentMode::Leaderless) {
    auto selection = unrank_combination(index, static_cast<std::uint32_t>(allowed_.size()), n_);
    std::vector<SiteId> members;
    members.reserve(n_);
    for (auto pos : selection) members.push_back(allowed_[pos]);
    return Deployment::leaderless(std::move(members));
  }
  const std::uint64_t block = binomial(allowed_.size() - 1, n_ - 1);
  const std::size_t leader_pos = static_cast<std::size_t>(index / block);
  auto selection =
      unrank_combination(index % block, static_cast<std::uint32_t>(allowed_.size()) - 1, n_ - 1);
  std::vector<SiteId> followers;
  followers.reserve(n_ - 1);
  for (auto pos : selection) {
    followers.push_back(allowed_[pos < leader_pos ? pos : pos + 1]);
  }
  return Deployment::leader_based(allowed_[leader_pos], std::move(followers));
}

DeploymentCursor DeploymentSpace::cursor(std::uint64_t start) const {
  return DeploymentCursor(*this, start);
}

void DeploymentSpace::for_each(std::uint64_t begin, std::uint64_t end,
                               const std::function<void(std::uint64_t, const Deployment&)>& fn) const {
  DeploymentCursor c = cursor(begin);
  Deployment d = Deployment::leaderless({0});
  for (std::uint64_t index = begin; index < end; ++index) {
    if (!c.next(d)) break;
    fn(index, d);
  }
}

DeploymentCursor::DeploymentCursor(const DeploymentSpace& space, std::uint64_t start)
    : space_(&space) {
  if (start >= space.count()) {
    exhausted_ = true;
    return;
  }
  load(start);
}

void DeploymentCursor::load(std::uint64_t index) {
  const auto& allowed = space_->allowed();
  const std::uint32_t n = space_->n();
  if (space_->mode() == DeploymentMode::Leaderless) {
    leader_pos_ = 0;
    selection_ = unrank_combination(index, static_cast<std::uint32_t>(allowed.size()), n);
    return;
  }
  const std::uint64_t block = binomial(allowed.size() - 1, n - 1);
  leader_pos_ = static_cast<std::size_t>(index / block);
  selection_ =
      unrank_combination(index % block, static_cast<std::uint32_t>(allowed.size()) - 1, n - 1);
}

bool DeploymentCursor::next(Deployment& out) {
  if (exhausted_) return false;

  const auto& allowed = space_->allowed();
  out.sites_.clear();
  if (space_->mode() == DeploymentMode::Leaderless) {
    out.mode_ = DeploymentMode::Leaderless;
    for (auto pos : selection_) out.sites_.push_back(allowed[pos]);
  } else {
    out.mode_ = DeploymentMode::LeaderBased;
    out.sites_.push_back(allowed[leader_pos_]);
    for (auto pos : selection_) {
      out.sites_.push_back(allowed[pos < leader_pos_ ? pos : pos + 1]);
    }
  }

  exhausted_ = !advance();
  return true;
}

bool DeploymentCursor::advance() {
  const std::uint32_t pool =
      static_cast<std::uint32_t>(space_->allowed().size()) -
      (space_->mode() == DeploymentMode::Leaderless ? 0 : 1);
  const std::uint32_t t = static_cast<std::uint32_t>(selection_.size());

  // Lexicographic successor of the current t-subset of {0, ..., pool-1}.
  std::uint32_t slot = t;
  while (slot > 0) {
    --slot;
    if (selection_[slot] < pool - (t - slot)) {
      ++selection_[slot];
      for (std::uint32_t s = slot + 1; s < t; ++s) selection_[s] = selection_[s - 1] + 1;
      return true;
    }
  }
  // Combination wrapped (or t == 0): move to the next leader.
  if (space_->mode() == DeploymentMode::Leaderless) return false;
  if (++leader_pos_ >= space_->allowed().size()) return false;
  for (std::uint32_t s = 0; s < t; ++s) selection_[s] = s;
  return true;
}

}  // namespace georank
