#include "rnnbo/io.hpp"

#include "rnnbo/errors.hpp"

#include <cstdlib>

namespace rnnbo::io {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw InputError(context + ": not a number: '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s, const std::string& context) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw InputError(context + ": not an integer: '" + s + "'");
    }
    return v;
}

} // namespace rnnbo::io
