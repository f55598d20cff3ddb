#pragma once

#include <string>

namespace surfacemdp {

/// Fixed-point text for CSV output, locale independent; NaN prints as "nan".
std::string fixed(double value, int precision = 10);

} // namespace surfacemdp
