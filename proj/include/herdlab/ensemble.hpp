#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace herdlab {

// Runs `fn(member_index, seed)` for `count` members with seeds seed_base,
// seed_base + 1, ...  Member work is independent, so results land in a
// preallocated slot per member and the order never depends on scheduling.
template <class T>
std::vector<T> run_ensemble(std::size_t count, std::uint64_t seed_base, int jobs,
                            const std::function<T(std::size_t, std::uint64_t)>& fn);

template <class T>
std::vector<T> run_ensemble_serial(std::size_t count, std::uint64_t seed_base,
                                   const std::function<T(std::size_t, std::uint64_t)>& fn);

}  // namespace herdlab

#include "herdlab/ensemble_impl.hpp"
