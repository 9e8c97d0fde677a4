#include "gedf/report.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gedf {

char gantt_glyph(TaskId id) {
  if (id == 0) return '.';
  if (id <= 9) return static_cast<char>('0' + id);
  if (id <= 35) return static_cast<char>('A' + (id - 10));
  if (id <= 61) return static_cast<char>('a' + (id - 36));
  return '#';
}

std::string render_gantt(const ScheduleTrace& trace, std::size_t width) {
  if (trace.empty()) throw std::invalid_argument("cannot chart an empty trace");
  const std::size_t m = trace.processors();
  const std::string widest = "P" + std::to_string(m);
  const std::size_t prefix = widest.size() + 3;  // "P12 | "
  const std::size_t per_block = width > prefix + 10 ? width - prefix : 10;

  std::ostringstream out;
  for (Tick first = 0; first < trace.ticks(); first += per_block) {
    const Tick last = std::min<Tick>(first + per_block, trace.ticks());
    const std::size_t cols = static_cast<std::size_t>(last - first);
    if (first != 0) out << '\n';

    std::string ruler(cols, ' ');
    std::size_t free_from = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const Tick t = first + c;
      if (t % 5 != 0 || c < free_from) continue;
      const std::string label = std::to_string(t);
      if (c + label.size() > cols) continue;
      ruler.replace(c, label.size(), label);
      free_from = c + label.size() + 1;
    }
    while (!ruler.empty() && ruler.back() == ' ') ruler.pop_back();
    out << std::string(prefix, ' ') << ruler << '\n';

    for (std::size_t cpu = 0; cpu < m; ++cpu) {
      std::string name = "P" + std::to_string(cpu + 1);
      name.resize(widest.size(), ' ');
      out << name << " | ";
      for (Tick t = first; t < last; ++t) out << gantt_glyph(trace.at(t, cpu));
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace gedf
