#pragma once

#include <string>
#include <vector>

#include "beltrami/numerics.hpp"

namespace beltrami {

/// CFLD1 dump: magic line, "nx ny x0 y0 dx dy" line, then little-endian
/// (re, im) float64 pairs with y as the outer index.
void dump_field(const ComplexField& field, const std::string& path);
ComplexField read_field(const std::string& path);

/// 17 significant digits, '.' decimal separator.
std::string csv_number(double v);

/// Comma-separated, LF-terminated table.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace beltrami
