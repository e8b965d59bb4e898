#pragma once

// Query-model cost accounting.
//
// Every access to L1 or L2 costs one unit, as does every read or write of
// auxiliary workspace. A comparison is charged as two reads and a swap as two
// reads plus two writes. The input lists themselves are static memory and do
// not count towards the workspace.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace matchsim {

enum class AccessKind : std::uint8_t { l1_query, l2_query, mem_read, mem_write };

enum class Phase : std::uint8_t { sort, inner_search, outer_search, final_verify };

inline constexpr std::array<Phase, 4> kAllPhases = {
    Phase::sort, Phase::inner_search, Phase::outer_search, Phase::final_verify};

std::string_view to_string(Phase phase) noexcept;
std::string_view to_string(AccessKind kind) noexcept;

/// The four access counters of the work factor.
struct Counters {
  std::uint64_t l1_queries = 0;
  std::uint64_t l2_queries = 0;
  std::uint64_t mem_reads = 0;
  std::uint64_t mem_writes = 0;

  constexpr std::uint64_t total() const noexcept {
    return l1_queries + l2_queries + mem_reads + mem_writes;
  }

  constexpr std::uint64_t& operator[](AccessKind kind) noexcept {
    switch (kind) {
      case AccessKind::l1_query: return l1_queries;
      case AccessKind::l2_query: return l2_queries;
      case AccessKind::mem_read: return mem_reads;
      case AccessKind::mem_write: break;
    }
    return mem_writes;
  }
  constexpr std::uint64_t operator[](AccessKind kind) const noexcept {
    return const_cast<Counters&>(*this)[kind];
  }

  constexpr Counters& operator+=(const Counters& o) noexcept {
    l1_queries += o.l1_queries;
    l2_queries += o.l2_queries;
    mem_reads += o.mem_reads;
    mem_writes += o.mem_writes;
    return *this;
  }
  friend constexpr Counters operator+(Counters a, const Counters& b) noexcept { return a += b; }
  friend constexpr Counters operator*(Counters a, std::uint64_t k) noexcept {
    a.l1_queries *= k;
    a.l2_queries *= k;
    a.mem_reads *= k;
    a.mem_writes *= k;
    return a;
  }
  friend constexpr Counters operator*(std::uint64_t k, const Counters& a) noexcept { return a * k; }
  friend constexpr bool operator==(const Counters&, const Counters&) = default;
};

/// Per-run cost ledger: top-level counters, a sub-ledger per phase and the
/// high-water mark of live workspace cells.
class CostLedger {
 public:
  void charge(AccessKind kind, std::uint64_t amount, Phase phase) noexcept;
  /// Charges `bundle` `times` times against `phase`.
  void charge(const Counters& bundle, Phase phase, std::uint64_t times = 1) noexcept;

  const Counters& totals() const noexcept { return totals_; }
  const Counters& phase(Phase p) const noexcept { return phases_[static_cast<std::size_t>(p)]; }

  std::uint64_t total_cost() const noexcept { return totals_.total(); }
  std::uint64_t l1_queries() const noexcept { return totals_.l1_queries; }
  std::uint64_t l2_queries() const noexcept { return totals_.l2_queries; }
  std::uint64_t mem_reads() const noexcept { return totals_.mem_reads; }
  std::uint64_t mem_writes() const noexcept { return totals_.mem_writes; }

  void acquire_workspace(std::uint64_t cells) noexcept;
  void release_workspace(std::uint64_t cells) noexcept;
  std::uint64_t live_workspace() const noexcept { return live_workspace_; }
  std::uint64_t peak_workspace() const noexcept { return peak_workspace_; }

  friend bool operator==(const CostLedger&, const CostLedger&) = default;

 private:
  Counters totals_;
  std::array<Counters, 4> phases_{};
  std::uint64_t live_workspace_ = 0;
  std::uint64_t peak_workspace_ = 0;
};

/// Holds `cells` of workspace on a ledger for its lifetime.
class WorkspaceLease {
 public:
  WorkspaceLease() = default;
  WorkspaceLease(CostLedger& ledger, std::uint64_t cells) noexcept;
  WorkspaceLease(WorkspaceLease&& other) noexcept;
  WorkspaceLease& operator=(WorkspaceLease&& other) noexcept;
  WorkspaceLease(const WorkspaceLease&) = delete;
  WorkspaceLease& operator=(const WorkspaceLease&) = delete;
  ~WorkspaceLease();

  void release() noexcept;
  std::uint64_t cells() const noexcept { return cells_; }

 private:
  CostLedger* ledger_ = nullptr;
  std::uint64_t cells_ = 0;
};

}  // namespace matchsim
