#pragma once

#include <array>

namespace spinconn {

/// Coordinates (x0, x1, x2, x3) of a chart point.
using Point = std::array<double, 4>;

}  // namespace spinconn
