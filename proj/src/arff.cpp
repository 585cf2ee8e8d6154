#include "frugal/arff.hpp"

#include "frugal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace frugal {

namespace {

struct Field {
    std::string text;
    bool quoted{ false };
};

// Splits one data line (or the inside of a nominal set) on commas, honouring quotes.
std::vector<Field> split_fields(std::string_view line, std::string_view source, std::size_t line_no) {
    std::vector<Field> fields;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (true) {
        while (i < n && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        Field field;
        if (i < n && (line[i] == '\'' || line[i] == '"')) {
            const char quote = line[i++];
            field.quoted = true;
            bool closed = false;
            while (i < n) {
                const char c = line[i++];
                if (c == '\\' && i < n) {
                    field.text.push_back(line[i++]);
                } else if (c == quote) {
                    closed = true;
                    break;
                } else {
                    field.text.push_back(c);
                }
            }
            if (!closed) {
                throw ParseError{ std::string{ source }, line_no, "unterminated quoted value" };
            }
            while (i < n && (line[i] == ' ' || line[i] == '\t')) {
                ++i;
            }
            if (i < n && line[i] != ',') {
                throw ParseError{ std::string{ source }, line_no, "unexpected text after quoted value" };
            }
        } else {
            const std::size_t start = i;
            while (i < n && line[i] != ',') {
                ++i;
            }
            field.text = std::string{ detail::trim(line.substr(start, i - start)) };
        }
        fields.push_back(std::move(field));
        if (i >= n) {
            break;
        }
        ++i;  // skip ','
    }
    return fields;
}

// Reads a possibly quoted name token from the front of `rest`, advancing it.
std::string take_name(std::string_view &rest, std::string_view source, std::size_t line_no) {
    rest = detail::trim(rest);
    if (rest.empty()) {
        throw ParseError{ std::string{ source }, line_no, "missing name" };
    }
    std::string name;
    if (rest.front() == '\'' || rest.front() == '"') {
        const char quote = rest.front();
        std::size_t i = 1;
        bool closed = false;
        while (i < rest.size()) {
            const char c = rest[i++];
            if (c == '\\' && i < rest.size()) {
                name.push_back(rest[i++]);
            } else if (c == quote) {
                closed = true;
                break;
            } else {
                name.push_back(c);
            }
        }
        if (!closed) {
            throw ParseError{ std::string{ source }, line_no, "unterminated quoted name" };
        }
        rest.remove_prefix(i);
    } else {
        std::size_t i = 0;
        while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i]))) {
            ++i;
        }
        name = std::string{ rest.substr(0, i) };
        rest.remove_prefix(i);
    }
    rest = detail::trim(rest);
    return name;
}

ArffAttribute parse_attribute(std::string_view rest, std::string_view source, std::size_t line_no) {
    ArffAttribute attribute;
    attribute.name = take_name(rest, source, line_no);
    if (rest.empty()) {
        throw ParseError{ std::string{ source }, line_no, fmt::format("attribute '{}' has no type", attribute.name) };
    }
    if (rest.front() == '{') {
        const std::size_t close = rest.rfind('}');
        if (close == std::string_view::npos) {
            throw ParseError{ std::string{ source }, line_no, "unterminated nominal value set" };
        }
        if (!detail::trim(rest.substr(close + 1)).empty()) {
            throw ParseError{ std::string{ source }, line_no, "unexpected text after nominal value set" };
        }
        attribute.kind = AttributeKind::nominal;
        const std::string_view inner = rest.substr(1, close - 1);
        if (detail::trim(inner).empty()) {
            throw ParseError{ std::string{ source }, line_no, "empty nominal value set" };
        }
        for (Field &f : split_fields(inner, source, line_no)) {
            if (f.text.empty() && !f.quoted) {
                throw ParseError{ std::string{ source }, line_no, "empty nominal value" };
            }
            if (std::find(attribute.nominal_values.begin(), attribute.nominal_values.end(), f.text) != attribute.nominal_values.end()) {
                throw ParseError{ std::string{ source }, line_no, fmt::format("duplicate nominal value '{}'", f.text) };
            }
            attribute.nominal_values.push_back(std::move(f.text));
        }
        return attribute;
    }
    const std::string type = detail::to_lower(rest);
    if (type == "numeric" || type == "real" || type == "integer") {
        attribute.kind = AttributeKind::numeric;
    } else if (type == "string") {
        attribute.kind = AttributeKind::string;
    } else {
        throw ParseError{ std::string{ source }, line_no, fmt::format("unsupported attribute type '{}'", rest) };
    }
    return attribute;
}

ArffValue parse_cell(const Field &field, const ArffAttribute &attribute, std::string_view source, std::size_t line_no) {
    if (!field.quoted && field.text == "?") {
        return Missing{};
    }
    switch (attribute.kind) {
        case AttributeKind::numeric: {
            const auto value = detail::parse_double(field.text);
            if (!value) {
                throw ParseError{ std::string{ source }, line_no, fmt::format("invalid numeric value '{}' for attribute '{}'", field.text, attribute.name) };
            }
            return *value;
        }
        case AttributeKind::nominal:
            if (std::find(attribute.nominal_values.begin(), attribute.nominal_values.end(), field.text) == attribute.nominal_values.end()) {
                throw ParseError{ std::string{ source }, line_no, fmt::format("undeclared nominal value '{}' for attribute '{}'", field.text, attribute.name) };
            }
            return field.text;
        case AttributeKind::string:
            return field.text;
    }
    return Missing{};
}

bool needs_quotes(std::string_view text) {
    if (text.empty() || text == "?") {
        return true;
    }
    return text.find_first_of(" \t,'\"{}%\\") != std::string_view::npos;
}

std::string quote_if_needed(std::string_view text) {
    if (!needs_quotes(text)) {
        return std::string{ text };
    }
    std::string out{ "'" };
    for (const char c : text) {
        if (c == '\'' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

}  // namespace

std::optional<std::size_t> ArffRelation::find_attribute(std::string_view attribute_name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (detail::iequals(attributes[i].name, attribute_name)) {
            return i;
        }
    }
    return std::nullopt;
}

ArffRelation parse_arff(std::istream &in, std::string_view source_name) {
    ArffRelation relation;
    bool seen_relation = false;
    bool in_data = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '%') {
            continue;
        }
        if (!in_data) {
            if (line.front() != '@') {
                throw ParseError{ std::string{ source_name }, line_no, "expected a header declaration" };
            }
            if (detail::istarts_with(line, "@relation")) {
                if (seen_relation) {
                    throw ParseError{ std::string{ source_name }, line_no, "duplicate @relation" };
                }
                std::string_view rest = line.substr(9);
                relation.name = take_name(rest, source_name, line_no);
                if (!rest.empty()) {
                    throw ParseError{ std::string{ source_name }, line_no, "unexpected text after relation name" };
                }
                seen_relation = true;
            } else if (detail::istarts_with(line, "@attribute")) {
                if (!seen_relation) {
                    throw ParseError{ std::string{ source_name }, line_no, "@attribute before @relation" };
                }
                ArffAttribute attribute = parse_attribute(line.substr(10), source_name, line_no);
                if (relation.find_attribute(attribute.name)) {
                    throw ParseError{ std::string{ source_name }, line_no, fmt::format("duplicate attribute '{}'", attribute.name) };
                }
                relation.attributes.push_back(std::move(attribute));
            } else if (detail::istarts_with(line, "@data") && detail::trim(line.substr(5)).empty()) {
                if (!seen_relation) {
                    throw ParseError{ std::string{ source_name }, line_no, "@data before @relation" };
                }
                if (relation.attributes.empty()) {
                    throw ParseError{ std::string{ source_name }, line_no, "@data without any @attribute" };
                }
                in_data = true;
            } else {
                throw ParseError{ std::string{ source_name }, line_no, fmt::format("unknown header declaration '{}'", line) };
            }
            continue;
        }
        if (line.front() == '{') {
            throw ParseError{ std::string{ source_name }, line_no, "sparse rows are not supported" };
        }
        if (line.front() == '@') {
            throw ParseError{ std::string{ source_name }, line_no, "header declaration inside @data section" };
        }
        const std::vector<Field> fields = split_fields(line, source_name, line_no);
        if (fields.size() != relation.attributes.size()) {
            throw ParseError{ std::string{ source_name }, line_no, fmt::format("row has {} values but {} attributes are declared", fields.size(), relation.attributes.size()) };
        }
        std::vector<ArffValue> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            row.push_back(parse_cell(fields[c], relation.attributes[c], source_name, line_no));
        }
        relation.rows.push_back(std::move(row));
    }
    if (!in_data) {
        throw ParseError{ std::string{ source_name }, line_no, "missing @data section" };
    }
    return relation;
}

ArffRelation parse_arff(std::string_view text, std::string_view source_name) {
    std::istringstream in{ std::string{ text } };
    return parse_arff(in, source_name);
}

ArffRelation read_arff_file(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw DataError{ fmt::format("cannot open file '{}'", path.string()) };
    }
    return parse_arff(in, path.string());
}

std::string serialize_arff(const ArffRelation &relation) {
    std::string out = fmt::format("@relation {}\n\n", quote_if_needed(relation.name));
    for (const ArffAttribute &attribute : relation.attributes) {
        out += fmt::format("@attribute {} ", quote_if_needed(attribute.name));
        switch (attribute.kind) {
            case AttributeKind::numeric:
                out += "numeric";
                break;
            case AttributeKind::string:
                out += "string";
                break;
            case AttributeKind::nominal: {
                out += '{';
                for (std::size_t i = 0; i < attribute.nominal_values.size(); ++i) {
                    if (i > 0) {
                        out += ',';
                    }
                    out += quote_if_needed(attribute.nominal_values[i]);
                }
                out += '}';
                break;
            }
        }
        out += '\n';
    }
    out += "\n@data\n";
    for (const auto &row : relation.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out += ',';
            }
            const ArffValue &cell = row[c];
            if (is_missing(cell)) {
                out += '?';
            } else if (const double *d = std::get_if<double>(&cell)) {
                out += fmt::format("{}", *d);
            } else {
                out += quote_if_needed(std::get<std::string>(cell));
            }
        }
        out += '\n';
    }
    return out;
}

void write_arff_file(const ArffRelation &relation, const std::filesystem::path &path) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw DataError{ fmt::format("cannot write file '{}'", path.string()) };
    }
    out << serialize_arff(relation);
}

}  // namespace frugal
