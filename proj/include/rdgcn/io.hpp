#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rdgcn {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// FNV-1a over raw bytes, as a fixed-width hex string.
std::string fnv1a_hex(std::string_view bytes);

void write_file(const std::string& path, std::string_view content);

// Two-column "t,weight" rows, no header: one row per integer distance.
void write_curve_csv(std::ostream& out, const std::vector<std::pair<int, double>>& samples);

}  // namespace rdgcn
