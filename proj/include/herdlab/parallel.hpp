#pragma once

#include <cstddef>
#include <functional>

namespace herdlab::par {

bool openmp_enabled();
int hardware_jobs();

// Job count used when a caller passes jobs = 0: HERDLAB_JOBS env if set,
// otherwise hardware_jobs(); can be overridden for the process.
int default_jobs();
void set_default_jobs(int jobs);
int resolve(int requested);

// Runs body(0..n-1); iterations must be independent.  Writers are expected to
// target disjoint slots so that results do not depend on the schedule.
void for_each(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// Reference path used in tests against for_each.
void for_each_serial(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace herdlab::par
