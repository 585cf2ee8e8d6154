#pragma once

// Reader and writer for the dense ARFF subset used by ASLib scenario tables.
//
// Supported: case-insensitive @relation / @attribute / @data, attribute types
// numeric (also real/integer), string and nominal {v1,...,vk}, '%' comment
// lines, comma-separated fields, '?' for missing cells, and names or values
// quoted with single or double quotes. Sparse rows and date/relational
// attributes are rejected.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace frugal {

struct Missing {
    friend bool operator==(Missing, Missing) noexcept { return true; }
};

/// A single ARFF cell. Nominal and string cells both carry text.
using ArffValue = std::variant<Missing, double, std::string>;

[[nodiscard]] inline bool is_missing(const ArffValue &v) noexcept { return std::holds_alternative<Missing>(v); }

enum class AttributeKind { numeric, nominal, string };

struct ArffAttribute {
    std::string name;
    AttributeKind kind{ AttributeKind::numeric };
    std::vector<std::string> nominal_values;  // only for nominal

    friend bool operator==(const ArffAttribute &, const ArffAttribute &) = default;
};

struct ArffRelation {
    std::string name;
    std::vector<ArffAttribute> attributes;
    std::vector<std::vector<ArffValue>> rows;

    /// Index of the attribute with the given name (case-insensitive).
    [[nodiscard]] std::optional<std::size_t> find_attribute(std::string_view attribute_name) const;

    friend bool operator==(const ArffRelation &, const ArffRelation &) = default;
};

/// Parses ARFF text. Errors are ParseError carrying `source_name` and the 1-based line number.
[[nodiscard]] ArffRelation parse_arff(std::istream &in, std::string_view source_name = "<arff>");
[[nodiscard]] ArffRelation parse_arff(std::string_view text, std::string_view source_name = "<arff>");
[[nodiscard]] ArffRelation read_arff_file(const std::filesystem::path &path);

/// Writes the relation so that parse_arff(serialize_arff(r)) == r.
[[nodiscard]] std::string serialize_arff(const ArffRelation &relation);
void write_arff_file(const ArffRelation &relation, const std::filesystem::path &path);

}  // namespace frugal
