// fft_lock.hpp: FFTW planner calls are not thread-safe; serialize them.

#pragma once

#include <mutex>

namespace qtrack::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace qtrack::detail
