#include "mlp/csv.hpp"

#include <cmath>
#include <cstdio>

namespace mlp {

std::string csv_quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) field(n);
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::field(std::string_view s) {
    separator();
    out_ << csv_quote(s);
    return *this;
}

CsvWriter& CsvWriter::field(double v) {
    separator();
    out_ << format_real(v);
    return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    out_ << "\r\n";
    row_started_ = false;
}

}  // namespace mlp
