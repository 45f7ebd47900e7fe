#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace sirhawkes::csv {

// Decimal with 9 significant digits; "inf"/"nan" for non-finite values.
[[nodiscard]] std::string format(double value);
[[nodiscard]] double round9(double value);

// Splits one CSV record. Double-quoted fields may contain commas and "".
[[nodiscard]] std::vector<std::string> split(std::string_view line);
[[nodiscard]] std::string quote(std::string_view field);

// Parses a full-string number; returns false on trailing garbage.
[[nodiscard]] bool parse_number(std::string_view field, double& value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based, header is line 1

    [[nodiscard]] int column(std::string_view name) const;
};

[[nodiscard]] Table read_table(std::istream& in);

[[nodiscard]] std::ifstream open_input(const std::filesystem::path& path);
[[nodiscard]] std::ofstream open_output(const std::filesystem::path& path);

}  // namespace sirhawkes::csv
