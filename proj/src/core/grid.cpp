#include "mfgdc/core/grid.hpp"

#include <string>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

TorusGrid::TorusGrid(int dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (!is_power_of_two(n)) {
    throw InvalidArgument("n must be a power of two");
  }
  if (n < 8) {
    throw InvalidArgument("n must be at least 8");
  }
}

TorusGrid make_grid(int dim, std::size_t n) { return TorusGrid(dim, n); }

}  // namespace mfgdc
