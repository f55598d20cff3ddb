#include "surfacemdp/format.hpp"

#include <cmath>
#include <cstdio>

namespace surfacemdp {

std::string fixed(double value, int precision) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    // Avoid printing "-0.000..." for tiny negative round-off.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    std::string out(buf);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

} // namespace surfacemdp
