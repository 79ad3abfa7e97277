#pragma once

#include <stdexcept>

namespace spinmem {

// Config parsing / validation failure. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Desk-scale guard tripped (sector or joint state too large for exact work).
// The CLI maps this to exit code 2.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical contract failure (diagonalization, fits, flat signals).
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spinmem
