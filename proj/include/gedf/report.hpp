#pragma once

#include <string>

#include "gedf/sim.hpp"

namespace gedf {

/// Glyph for a task id in the Gantt chart: 1-9, then A-Z, a-z, then '#'.
/// Idle is '.'.
char gantt_glyph(TaskId id);

/// ASCII Gantt chart: a tick ruler labelled every 5 columns, then one row per
/// processor with one column per tick. Lines are wrapped at `width`
/// characters; each wrapped block repeats the ruler. Throws
/// std::invalid_argument for an empty trace.
std::string render_gantt(const ScheduleTrace& trace, std::size_t width = 80);

}  // namespace gedf
