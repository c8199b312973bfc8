#pragma once

// Reader for the sectioned record format shared by feeder and scenario files:
//
//   # comment to end of line
//   [section]
//   key=value key2 = value2, key3=value3
//
// Every non-blank line inside a section is one record of named fields.
// Fields are separated by whitespace or commas; values may not contain
// either. Section and key names are case-insensitive.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridcoop {

struct Record {
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::string>> fields;

    bool has(std::string_view key) const;
    std::optional<std::string> find(std::string_view key) const;

    /// Accessors below throw ParseError naming the line and field.
    std::string require(std::string_view key) const;
    double require_double(std::string_view key) const;
    std::optional<double> optional_double(std::string_view key) const;
    std::optional<long long> optional_integer(std::string_view key) const;

    /// Throws if the record holds a key outside `allowed`.
    void expect_only(std::initializer_list<std::string_view> allowed) const;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Record> records;

    /// All fields of a key-per-line section folded into one record.
    /// Throws ParseError on a repeated key.
    Record merged() const;
};

struct RecordDocument {
    std::vector<Section> sections;

    /// Sections may appear more than once; records are concatenated in order.
    std::optional<Section> section(std::string_view name) const;

    /// Throws ParseError for any section name outside `allowed`.
    void expect_sections(std::initializer_list<std::string_view> allowed) const;
};

/// Throws ParseError on malformed lines, fields outside a section, or a key
/// repeated within one record.
RecordDocument parse_record_text(std::string_view text);

/// Reads a whole file; throws FileNotFoundError.
std::string read_text_file(const std::string& path);

}  // namespace gridcoop
