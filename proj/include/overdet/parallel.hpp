#pragma once

#include <functional>

namespace overdet {

/// Worker count from OVERDET_LAB_THREADS (0 or unset means serial).
int configured_threads();

/// Runs body(i) for i in [0, count) on up to configured_threads() workers.
/// Results must be written to per-index slots; the first exception is rethrown.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace overdet
