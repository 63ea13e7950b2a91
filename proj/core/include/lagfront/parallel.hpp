#pragma once

#include <cstddef>
#include <functional>

namespace lagfront {

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Each index must write only to its own output slot; the first exception
// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lagfront
