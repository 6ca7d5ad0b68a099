#include "hdmean/csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdmean/errors.hpp"

namespace hdmean {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

}  // namespace

SampleMatrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_cells(line);
        std::vector<double> values;
        values.reserve(cells.size());
        std::optional<std::size_t> bad_cell;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = parse_number(cells[c]);
            if (!v) {
                bad_cell = c;
                break;
            }
            values.push_back(*v);
        }
        if (first_row) {
            first_row = false;
            width = cells.size();
            if (bad_cell) continue;  // header
        }
        if (cells.size() != width) {
            throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                              " fields, expected " + std::to_string(width));
        }
        if (bad_cell) {
            throw FormatError("line " + std::to_string(line_no) + ", field " +
                              std::to_string(*bad_cell + 1) + " is not a number: '" +
                              std::string(cells[*bad_cell]) + "'");
        }
        rows.push_back(std::move(values));
    }
    if (rows.size() < 2) {
        throw InvalidData("need at least 2 data rows, found " + std::to_string(rows.size()));
    }
    Matrix data(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return SampleMatrix(std::move(data));
}

SampleMatrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open '" + path.string() + "'");
    return read_csv(in);
}

void write_csv(std::ostream& out, const Matrix& data) {
    char buf[32];
    for (Index r = 0; r < data.rows(); ++r) {
        for (Index c = 0; c < data.cols(); ++c) {
            if (c > 0) out << ',';
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data(r, c));
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Matrix& data) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    write_csv(out, data);
}

}  // namespace hdmean
