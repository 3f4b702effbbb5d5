#pragma once

#include <cstddef>
#include <functional>

namespace igo {

/// Worker count: IGO_THREADS when set (minimum 1), otherwise the machine
/// parallelism.
int thread_budget();

/// Runs body(i) for i in [0, n) across the thread budget. Callers own the
/// output layout, so results are independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace igo
