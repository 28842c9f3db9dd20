#pragma once

namespace brd {

/// Which implementation of the data-parallel kernels to run. Both produce
/// bitwise-identical results; Serial is the reference.
enum class Backend { Serial, OpenMP };

/// OpenMP when compiled in, Serial otherwise.
Backend default_backend() noexcept;
bool openmp_available() noexcept;
int max_threads() noexcept;

}  // namespace brd
