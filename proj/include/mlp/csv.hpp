#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace mlp {

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string csv_quote(std::string_view field);

/// Shortest round-trip decimal form ("%.17g"); nan and inf spelled out.
std::string format_real(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> names);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(const char* s) { return field(std::string_view(s)); }
    CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
    CsvWriter& field(double v);
    CsvWriter& field(std::uint64_t v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(bool v) { return field(std::string_view(v ? "true" : "false")); }
    void end_row();

private:
    void separator();
    std::ostream& out_;
    bool row_started_ = false;
};

}  // namespace mlp
