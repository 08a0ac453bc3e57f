#pragma once

#include "herdlab/parallel.hpp"

namespace herdlab {

template <class T>
std::vector<T> run_ensemble(std::size_t count, std::uint64_t seed_base, int jobs,
                            const std::function<T(std::size_t, std::uint64_t)>& fn) {
  std::vector<T> out(count);
  par::for_each(count, jobs, [&](std::size_t i) { out[i] = fn(i, seed_base + i); });
  return out;
}

template <class T>
std::vector<T> run_ensemble_serial(std::size_t count, std::uint64_t seed_base,
                                   const std::function<T(std::size_t, std::uint64_t)>& fn) {
  std::vector<T> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = fn(i, seed_base + i);
  return out;
}

}  // namespace herdlab
