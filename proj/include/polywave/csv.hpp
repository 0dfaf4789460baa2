#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace polywave {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

using CsvCell = std::variant<std::string, double, std::int64_t>;

/// CSV with a leading `# schema=<name> version=<n>` comment line and a header row.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::string schema, int version, std::vector<std::string> columns);
    void row(const std::vector<CsvCell>& cells);
    std::size_t rows() const { return rows_; }
    const std::string& schema() const { return schema_; }
    int version() const { return version_; }

private:
    std::ostream& out_;
    std::string schema_;
    int version_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

/// Quotes a field if it contains a separator, quote or newline.
std::string csv_escape(const std::string& field);

} // namespace polywave
