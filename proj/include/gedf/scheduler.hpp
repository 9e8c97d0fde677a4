#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gedf/model.hpp"

namespace gedf {

enum class Policy { edf, llf };

std::string_view to_string(Policy p);
/// "edf" or "llf"; throws std::invalid_argument otherwise.
Policy parse_policy(std::string_view text);

/// Smaller key = higher priority. Ties on the primary component are broken
/// by task id, then by release instant.
struct PriorityKey {
  std::int64_t primary = 0;  // absolute deadline (EDF) or laxity (LLF)
  TaskId task_id = 0;
  Tick release = 0;

  friend auto operator<=>(const PriorityKey&, const PriorityKey&) = default;
};

/// Laxity may be negative: such a job can no longer meet its deadline.
std::int64_t laxity(const Job& job, Tick now);

PriorityKey priority_key(const Job& job, Tick now, Policy policy);

/// Indices into `ready` of the min(m, |ready|) highest-priority jobs, in
/// priority order. Slot k of the result runs on processor k + 1.
std::vector<std::size_t> dispatch(std::span<const Job> ready, std::size_t m, Tick now, Policy policy);

/// Allocation-free variant for the simulation loop; `keys` is scratch space.
void dispatch_into(std::span<const Job> ready, std::size_t m, Tick now, Policy policy,
                   std::vector<std::size_t>& out, std::vector<PriorityKey>& keys);

}  // namespace gedf
