#include "polywave/csv.hpp"

#include <charconv>
#include <cmath>

#include "polywave/error.hpp"

namespace polywave {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

CsvWriter::CsvWriter(std::ostream& out, std::string schema, int version, std::vector<std::string> columns)
    : out_(out), schema_(std::move(schema)), version_(version), columns_(columns.size()) {
    out_ << "# schema=" << schema_ << " version=" << version_ << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns[i]);
    out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) throw InputError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                                   std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) out_ << csv_escape(v);
                else if constexpr (std::is_same_v<T, double>) out_ << format_number(v);
                else out_ << v;
            },
            cells[i]);
    }
    out_ << '\n';
    ++rows_;
}

} // namespace polywave
