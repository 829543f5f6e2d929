#pragma once

#include <string>

#include "perron/config.hpp"

namespace perron {

enum class Command { Run, Check, Solve, Price, Decompose, Habit, PlotData };

// Exit codes: 0 ok, 2 config error, 3 a requested check failed,
// 4 solver non-convergence.
int run_pipeline(const RunConfig& cfg, Command cmd);

}  // namespace perron
