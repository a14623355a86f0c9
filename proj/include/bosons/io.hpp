#pragma once

#include <string>
#include <vector>

#include "bosons/fock.hpp"

namespace bosons {

/// Full-precision scientific formatting (17 significant digits) so every
/// artifact can be re-checked externally, bit for bit.
std::string format_full(double x);

/// Write a CSV file with a header row; cells already formatted.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Numeric convenience: every cell formatted with format_full.
void write_csv_numeric(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

/// Coordinate-triplet text dump (row, col, value) of a sparse operator.
void export_operator_triplets(const std::string& path, const SparseOperator& op);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bosons
