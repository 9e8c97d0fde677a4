#include "gedf/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gedf {

std::string_view to_string(Policy p) { return p == Policy::edf ? "edf" : "llf"; }

Policy parse_policy(std::string_view text) {
  if (text == "edf") return Policy::edf;
  if (text == "llf") return Policy::llf;
  throw std::invalid_argument("unknown policy '" + std::string(text) + "' (expected edf or llf)");
}

std::int64_t laxity(const Job& job, Tick now) {
  return static_cast<std::int64_t>(job.abs_deadline) - static_cast<std::int64_t>(now + job.remaining);
}

PriorityKey priority_key(const Job& job, Tick now, Policy policy) {
  const std::int64_t primary =
      policy == Policy::edf ? static_cast<std::int64_t>(job.abs_deadline) : laxity(job, now);
  return {primary, job.task_id, job.release};
}

void dispatch_into(std::span<const Job> ready, std::size_t m, Tick now, Policy policy,
                   std::vector<std::size_t>& out, std::vector<PriorityKey>& keys) {
  keys.clear();
  for (const Job& j : ready) keys.push_back(priority_key(j, now, policy));
  out.resize(ready.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  const std::size_t take = std::min(m, ready.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(take), out.end(),
                    [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  out.resize(take);
}

std::vector<std::size_t> dispatch(std::span<const Job> ready, std::size_t m, Tick now, Policy policy) {
  std::vector<std::size_t> out;
  std::vector<PriorityKey> keys;
  dispatch_into(ready, m, now, policy, out, keys);
  return out;
}

}  // namespace gedf
