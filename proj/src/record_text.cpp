#include "gridcoop/record_text.hpp"

#include "gridcoop/error.hpp"
#include "gridcoop/number_format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gridcoop {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_key_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.';
}

bool is_separator(char c) {
    return c == ' ' || c == '\t' || c == ',' || c == '\r';
}

std::string_view strip_comment(std::string_view line) {
    auto hash = line.find('#');
    if (hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    return line;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_separator(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_separator(s.back())) s.remove_suffix(1);
    return s;
}

Record parse_fields(std::string_view body, std::size_t line_no) {
    Record record;
    record.line = line_no;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && is_separator(body[i])) ++i;
        if (i >= body.size()) break;

        std::size_t key_begin = i;
        while (i < body.size() && is_key_char(body[i])) ++i;
        if (i == key_begin) {
            throw ParseError(line_no, std::string("unexpected character '") + body[i] + "'");
        }
        std::string key = to_lower(body.substr(key_begin, i - key_begin));

        while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
        if (i >= body.size() || body[i] != '=') {
            throw ParseError(line_no, "field '" + key + "' is missing '='");
        }
        ++i;
        while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;

        std::size_t value_begin = i;
        while (i < body.size() && !is_separator(body[i])) ++i;
        if (i == value_begin) {
            throw ParseError(line_no, "field '" + key + "' has an empty value");
        }
        if (record.has(key)) {
            throw ParseError(line_no, "field '" + key + "' repeated");
        }
        record.fields.emplace_back(std::move(key), std::string(body.substr(value_begin, i - value_begin)));
    }
    return record;
}

}  // namespace

bool Record::has(std::string_view key) const {
    return find(key).has_value();
}

std::optional<std::string> Record::find(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string Record::require(std::string_view key) const {
    auto value = find(key);
    if (!value) {
        throw ParseError(line, "missing field '" + std::string(key) + "'");
    }
    return *value;
}

double Record::require_double(std::string_view key) const {
    auto text = require(key);
    auto value = parse_double(text);
    if (!value) {
        throw ParseError(line, "field '" + std::string(key) + "' is not a number: '" + text + "'");
    }
    return *value;
}

std::optional<double> Record::optional_double(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return require_double(key);
}

std::optional<long long> Record::optional_integer(std::string_view key) const {
    auto text = find(key);
    if (!text) return std::nullopt;
    auto value = parse_integer(*text);
    if (!value) {
        throw ParseError(line, "field '" + std::string(key) + "' is not an integer: '" + *text + "'");
    }
    return value;
}

void Record::expect_only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : fields) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw ParseError(line, "unknown field '" + k + "'");
        }
    }
}

Record Section::merged() const {
    Record out;
    out.line = line;
    for (const auto& record : records) {
        for (const auto& field : record.fields) {
            if (out.has(field.first)) {
                throw ParseError(record.line, "field '" + field.first + "' repeated in [" + name + "]");
            }
            out.fields.push_back(field);
        }
    }
    return out;
}

std::optional<Section> RecordDocument::section(std::string_view name) const {
    std::optional<Section> out;
    for (const auto& s : sections) {
        if (s.name != name) continue;
        if (!out) {
            out = s;
        } else {
            out->records.insert(out->records.end(), s.records.begin(), s.records.end());
        }
    }
    return out;
}

void RecordDocument::expect_sections(std::initializer_list<std::string_view> allowed) const {
    for (const auto& s : sections) {
        if (std::find(allowed.begin(), allowed.end(), s.name) == allowed.end()) {
            throw ParseError(s.line, "unknown section [" + s.name + "]");
        }
    }
}

RecordDocument parse_record_text(std::string_view text) {
    RecordDocument doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(line_no, "malformed section header");
            }
            auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char)) {
                throw ParseError(line_no, "malformed section name");
            }
            doc.sections.push_back(Section{to_lower(name), line_no, {}});
            continue;
        }
        if (doc.sections.empty()) {
            throw ParseError(line_no, "record outside of any section");
        }
        doc.sections.back().records.push_back(parse_fields(line, line_no));
    }
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileNotFoundError(path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gridcoop
