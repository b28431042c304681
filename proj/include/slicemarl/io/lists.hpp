#ifndef SLICEMARL_IO_LISTS_HPP
#define SLICEMARL_IO_LISTS_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "slicemarl/harness/experiment.hpp"
#include "slicemarl/io/error.hpp"
#include "slicemarl/io/metrics_csv.hpp"

namespace slicemarl::io {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

} // namespace detail

/// "1,2,3" -> {1, 2, 3}.
inline std::vector<double> parse_loads(const std::string& s, const std::string& key = "loads") {
    std::vector<double> out;
    for (const auto& p : detail::split(s, ',')) {
        const double v = detail::parse_double(p, key);
        if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorKind::Constraint, key, key + ": loads must be >= 0");
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorKind::Malformed, key, key + ": empty list");
    return out;
}

/// Comma list and inclusive ranges: "0..9", "1,4,7", "0..2,5".
inline std::vector<std::uint64_t> parse_seeds(const std::string& s, const std::string& key = "seeds") {
    std::vector<std::uint64_t> out;
    for (const auto& p : detail::split(s, ',')) {
        const auto dots = p.find("..");
        if (dots == std::string::npos) {
            out.push_back(detail::parse_uint(p, key));
            continue;
        }
        const auto lo = detail::parse_uint(p.substr(0, dots), key);
        const auto hi = detail::parse_uint(p.substr(dots + 2), key);
        if (hi < lo) throw Error(ErrorKind::Malformed, key, key + ": empty range '" + p + "'");
        for (auto v = lo; v <= hi; ++v) {
            out.push_back(v);
            if (v == hi) break;
        }
    }
    if (out.empty()) throw Error(ErrorKind::Malformed, key, key + ": empty list");
    return out;
}

inline std::vector<Algorithm> parse_algorithms(const std::string& s, const std::string& key = "algos") {
    std::vector<Algorithm> out;
    for (const auto& p : detail::split(s, ',')) {
        const auto a = parse_algorithm(p);
        if (!a) throw Error(ErrorKind::Malformed, key, key + ": unknown algorithm '" + p + "'");
        out.push_back(*a);
    }
    if (out.empty()) throw Error(ErrorKind::Malformed, key, key + ": empty list");
    return out;
}

} // namespace slicemarl::io

#endif // SLICEMARL_IO_LISTS_HPP
