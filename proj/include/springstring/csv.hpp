#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace springstring {

/// Floating-point text with 17 significant digits, the precision used for
/// every CSV column.
std::string fmt17(double v);

/// Writes `values` comma-separated with fmt17 and a trailing newline.
void write_csv_row(std::ostream& os, const std::vector<double>& values);

/// Worker count: SPRING_STRING_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. Each index is
/// visited exactly once; callers write results by index so output order never
/// depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace springstring
