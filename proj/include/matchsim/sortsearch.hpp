#pragma once

// Instrumented classical kernels shared by the matchers.
//
// The kernels are data-oblivious in their charges: a merge sort of n
// entries and a membership probe into a sorted list of n entries always
// cost the same, whatever the values. That is what lets the same code path
// stand in for a sort or lookup performed in superposition.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchsim/cost_ledger.hpp"
#include "matchsim/model.hpp"

namespace matchsim {

struct Entry {
  std::uint64_t value = 0;
  std::size_t index = 0;  // position in the originating list
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Entries sorted ascending by value.
class SortedList {
 public:
  SortedList() = default;

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const noexcept { return entries_[i]; }

 private:
  friend SortedList sort_instrumented(std::vector<Entry>, CostLedger&, Phase);
  explicit SortedList(std::vector<Entry> sorted) : entries_(std::move(sorted)) {}
  std::vector<Entry> entries_;
};

/// ceil(log2(n)), 0 for n <= 1.
std::uint32_t ceil_log2(std::uint64_t n) noexcept;

/// Bottom-up merge sort through an n-cell buffer. Every output step of every
/// merge is one comparison of the two run heads (an exhausted run compares
/// as +infinity) plus one write, so the charge is exactly
/// 2 n ceil(log2 n) reads and n ceil(log2 n) writes.
SortedList sort_instrumented(std::vector<Entry> values, CostLedger& ledger, Phase phase);

/// Closed-form charge of sort_instrumented on n entries.
Counters sort_charge(std::size_t n) noexcept;

/// Original index of `value` in `sorted`, if present. Runs a fixed
/// ceil(log2 n) halving steps followed by one equality probe; each probe is
/// one workspace read plus one read for the comparison.
std::optional<std::size_t> binary_membership(const SortedList& sorted, std::uint64_t value, CostLedger& ledger,
                                             Phase phase);

/// Closed-form charge of binary_membership on n entries.
Counters membership_charge(std::size_t n) noexcept;

/// Number of probes binary_membership makes on n entries.
std::uint64_t membership_probes(std::size_t n) noexcept;

/// ceil(n / block_size).
std::size_t block_count(std::size_t n, std::size_t block_size);

/// ceil(sqrt(n)).
std::size_t default_block_size(std::size_t n) noexcept;

/// A contiguous block of L1 copied into workspace and sorted. Owns its
/// workspace cells on the ledger while alive.
struct BlockView {
  std::size_t block_index = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  SortedList workspace;
  WorkspaceLease lease;
};

/// Copies block `block_index` of L1 (one L1 query and one write per entry)
/// and sorts it. The last block may be short. Throws std::invalid_argument if
/// the block does not exist.
BlockView block_view(const MatchInstance& instance, std::size_t block_index, std::size_t block_size,
                     CostLedger& ledger, Phase phase);

/// Closed-form charge of block_view for a block of `length` entries.
Counters block_view_charge(std::size_t length) noexcept;

/// Copies a whole list into workspace, charging one query and one write per
/// entry, and sorts it.
SortedList copy_and_sort(std::span<const std::uint64_t> list, AccessKind query_kind, CostLedger& ledger, Phase phase,
                         WorkspaceLease& lease);

}  // namespace matchsim
