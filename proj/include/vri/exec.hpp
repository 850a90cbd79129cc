#pragma once

#include <string_view>

namespace vri {

/// Selects the serial reference kernel or its OpenMP counterpart. Both
/// produce identical results; the serial path is kept for testing and
/// benchmarking.
enum class Exec { serial, parallel };

int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace vri
