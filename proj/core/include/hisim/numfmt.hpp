#pragma once

#include <string>
#include <string_view>

namespace hisim {

// Shortest decimal representation that parses back to the same double.
// Locale independent, '.' decimal separator.
std::string format_double(double value);

// Strict parse of a whole field; throws InputError on trailing garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace hisim
