#include "matchsim/cost_ledger.hpp"

#include <algorithm>
#include <utility>

namespace matchsim {

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::sort: return "sort";
    case Phase::inner_search: return "inner_search";
    case Phase::outer_search: return "outer_search";
    case Phase::final_verify: return "final_verify";
  }
  return "unknown";
}

std::string_view to_string(AccessKind kind) noexcept {
  switch (kind) {
    case AccessKind::l1_query: return "l1_queries";
    case AccessKind::l2_query: return "l2_queries";
    case AccessKind::mem_read: return "mem_reads";
    case AccessKind::mem_write: return "mem_writes";
  }
  return "unknown";
}

void CostLedger::charge(AccessKind kind, std::uint64_t amount, Phase phase) noexcept {
  totals_[kind] += amount;
  phases_[static_cast<std::size_t>(phase)][kind] += amount;
}

void CostLedger::charge(const Counters& bundle, Phase phase, std::uint64_t times) noexcept {
  const Counters scaled = bundle * times;
  totals_ += scaled;
  phases_[static_cast<std::size_t>(phase)] += scaled;
}

void CostLedger::acquire_workspace(std::uint64_t cells) noexcept {
  live_workspace_ += cells;
  peak_workspace_ = std::max(peak_workspace_, live_workspace_);
}

void CostLedger::release_workspace(std::uint64_t cells) noexcept {
  live_workspace_ -= std::min(cells, live_workspace_);
}

WorkspaceLease::WorkspaceLease(CostLedger& ledger, std::uint64_t cells) noexcept
    : ledger_(&ledger), cells_(cells) {
  ledger_->acquire_workspace(cells_);
}

WorkspaceLease::WorkspaceLease(WorkspaceLease&& other) noexcept
    : ledger_(std::exchange(other.ledger_, nullptr)), cells_(std::exchange(other.cells_, 0)) {}

WorkspaceLease& WorkspaceLease::operator=(WorkspaceLease&& other) noexcept {
  if (this != &other) {
    release();
    ledger_ = std::exchange(other.ledger_, nullptr);
    cells_ = std::exchange(other.cells_, 0);
  }
  return *this;
}

WorkspaceLease::~WorkspaceLease() { release(); }

void WorkspaceLease::release() noexcept {
  if (ledger_ != nullptr) ledger_->release_workspace(cells_);
  ledger_ = nullptr;
  cells_ = 0;
}

}  // namespace matchsim
