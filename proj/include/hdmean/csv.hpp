#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "hdmean/linalg.hpp"

namespace hdmean {

/// Comma-separated numeric table, one observation per row in time order.
/// A first row containing any non-numeric cell is taken as a header.
/// Throws FormatError on ragged rows or non-numeric cells after the header,
/// InvalidData if the file cannot be opened or fewer than two data rows remain.
[[nodiscard]] SampleMatrix read_csv(std::istream& in);
[[nodiscard]] SampleMatrix load_csv(const std::filesystem::path& path);

/// Writes rows with round-trip precision and no header.
void write_csv(std::ostream& out, const Matrix& data);
void save_csv(const std::filesystem::path& path, const Matrix& data);

}  // namespace hdmean
