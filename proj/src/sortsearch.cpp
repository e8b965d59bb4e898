#include "matchsim/sortsearch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace matchsim {

std::uint32_t ceil_log2(std::uint64_t n) noexcept {
  return n <= 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

SortedList sort_instrumented(std::vector<Entry> values, CostLedger& ledger, Phase phase) {
  const std::size_t n = values.size();
  if (n < 2) return SortedList(std::move(values));

  WorkspaceLease buffer_lease(ledger, n);
  std::vector<Entry> buffer(n);
  std::vector<Entry>* src = &values;
  std::vector<Entry>* dst = &buffer;
  Counters spent;

  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      for (std::size_t out = lo; out < hi; ++out) {
        const std::uint64_t left = i < mid ? (*src)[i].value : std::numeric_limits<std::uint64_t>::max();
        const bool take_left = i < mid && (j >= hi || left <= (*src)[j].value);
        spent.mem_reads += 2;
        spent.mem_writes += 1;
        (*dst)[out] = take_left ? (*src)[i++] : (*src)[j++];
      }
    }
    std::swap(src, dst);
  }
  ledger.charge(spent, phase);
  return SortedList(std::move(*src));
}

Counters sort_charge(std::size_t n) noexcept {
  const std::uint64_t steps = static_cast<std::uint64_t>(n) * ceil_log2(n);
  return Counters{.mem_reads = 2 * steps, .mem_writes = steps};
}

std::uint64_t membership_probes(std::size_t n) noexcept { return n == 0 ? 0 : ceil_log2(n) + 1; }

Counters membership_charge(std::size_t n) noexcept { return Counters{.mem_reads = 2 * membership_probes(n)}; }

std::optional<std::size_t> binary_membership(const SortedList& sorted, std::uint64_t value, CostLedger& ledger,
                                             Phase phase) {
  const std::size_t n = sorted.size();
  if (n == 0) return std::nullopt;

  // Invariant: the last entry with entry.value <= value (if any) lies in
  // [base, base + len).
  std::size_t base = 0;
  std::size_t len = n;
  std::uint64_t probes = 0;
  while (len > 1) {
    const std::size_t half = len / 2;
    ++probes;
    if (sorted[base + half].value <= value) base += half;
    len -= half;
  }
  ++probes;
  ledger.charge(AccessKind::mem_read, 2 * probes, phase);
  if (sorted[base].value == value) return sorted[base].index;
  return std::nullopt;
}

std::size_t block_count(std::size_t n, std::size_t block_size) {
  if (block_size == 0) throw std::invalid_argument("block_count: block size must be positive");
  return (n + block_size - 1) / block_size;
}

std::size_t default_block_size(std::size_t n) noexcept {
  if (n == 0) return 0;
  auto b = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (b * b < n) ++b;
  while (b > 1 && (b - 1) * (b - 1) >= n) --b;
  return b;
}

Counters block_view_charge(std::size_t length) noexcept {
  return Counters{.l1_queries = length, .mem_writes = length} + sort_charge(length);
}

BlockView block_view(const MatchInstance& instance, std::size_t block_index, std::size_t block_size,
                     CostLedger& ledger, Phase phase) {
  if (block_size == 0) throw std::invalid_argument("block_view: block size must be positive");
  const std::size_t blocks = block_count(instance.n, block_size);
  if (block_index >= blocks) {
    throw std::invalid_argument(
        fmt::format("block_view: block {} out of range for {} blocks of size {}", block_index, blocks, block_size));
  }
  BlockView view;
  view.block_index = block_index;
  view.offset = block_index * block_size;
  view.length = std::min(block_size, instance.n - view.offset);
  const std::span<const std::uint64_t> block(instance.list1.data() + view.offset, view.length);

  std::vector<Entry> copy;
  copy.reserve(view.length);
  view.lease = WorkspaceLease(ledger, view.length);
  for (std::size_t i = 0; i < view.length; ++i) copy.push_back({block[i], view.offset + i});
  ledger.charge(Counters{.l1_queries = view.length, .mem_writes = view.length}, phase);

  view.workspace = sort_instrumented(std::move(copy), ledger, phase);
  return view;
}

SortedList copy_and_sort(std::span<const std::uint64_t> list, AccessKind query_kind, CostLedger& ledger, Phase phase,
                         WorkspaceLease& lease) {
  std::vector<Entry> copy;
  copy.reserve(list.size());
  lease = WorkspaceLease(ledger, list.size());
  for (std::size_t i = 0; i < list.size(); ++i) copy.push_back({list[i], i});
  ledger.charge(query_kind, list.size(), phase);
  ledger.charge(AccessKind::mem_write, list.size(), phase);
  return sort_instrumented(std::move(copy), ledger, phase);
}

}  // namespace matchsim
