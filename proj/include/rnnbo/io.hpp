#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace rnnbo::io {

// Shortest representation that round-trips an IEEE double (17 significant digits).
inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Split one CSV line on commas. No quoting; none of our schemas need it.
std::vector<std::string> split_csv(const std::string& line);

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

} // namespace rnnbo::io
