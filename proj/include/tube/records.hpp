#pragma once

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tube {

using FieldValue = std::variant<std::int64_t, double, std::string>;

/// One flat output row; field order is the schema.
struct Record {
  std::vector<std::pair<std::string, FieldValue>> fields;

  Record& add(std::string name, std::int64_t v) {
    fields.emplace_back(std::move(name), v);
    return *this;
  }
  Record& add(std::string name, std::uint64_t v) {
    fields.emplace_back(std::move(name), static_cast<std::int64_t>(v));
    return *this;
  }
  Record& add(std::string name, std::int32_t v) {
    fields.emplace_back(std::move(name), static_cast<std::int64_t>(v));
    return *this;
  }
  Record& add(std::string name, double v) {
    fields.emplace_back(std::move(name), v);
    return *this;
  }
  Record& add(std::string name, std::string v) {
    fields.emplace_back(std::move(name), std::move(v));
    return *this;
  }
};

enum class OutputFormat : std::uint8_t { Csv, Json };

namespace detail {

/// 17 significant digits: enough for an exact double round-trip.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_quote(std::string_view s) {
  const bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string json_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

inline std::string value_csv(const FieldValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
  return csv_quote(std::get<std::string>(v));
}

inline std::string value_json(const FieldValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
  return json_quote(std::get<std::string>(v));
}

inline std::vector<std::string> schema_of(const std::vector<Record>& records) {
  std::vector<std::string> schema;
  if (records.empty()) return schema;
  schema.reserve(records[0].fields.size());
  for (const auto& [name, value] : records[0].fields) schema.push_back(name);
  return schema;
}

inline void check_schema(const std::vector<std::string>& schema,
                         const std::vector<Record>& records) {
  for (const Record& r : records) {
    if (r.fields.size() != schema.size()) {
      throw std::invalid_argument("emit: record does not match the command schema");
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (r.fields[i].first != schema[i]) {
        throw std::invalid_argument("emit: field '" + r.fields[i].first +
                                    "' out of schema order (expected '" + schema[i] + "')");
      }
    }
  }
}

}  // namespace detail

/// CSV with a header row and RFC 4180 quoting; an empty record list yields
/// a header-only file.
inline void emit_csv(std::ostream& os, const std::vector<std::string>& schema,
                     const std::vector<Record>& records) {
  detail::check_schema(schema, records);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) os << ',';
    os << detail::csv_quote(schema[i]);
  }
  os << '\n';
  for (const Record& r : records) {
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
      if (i) os << ',';
      os << detail::value_csv(r.fields[i].second);
    }
    os << '\n';
  }
}

/// JSON array of flat objects; numbers carry 17 significant digits.
inline void emit_json(std::ostream& os, const std::vector<std::string>& schema,
                      const std::vector<Record>& records) {
  detail::check_schema(schema, records);
  os << "[";
  for (std::size_t r = 0; r < records.size(); ++r) {
    os << (r ? ",\n " : "\n ");
    os << '{';
    for (std::size_t i = 0; i < records[r].fields.size(); ++i) {
      if (i) os << ", ";
      os << detail::json_quote(records[r].fields[i].first) << ": "
         << detail::value_json(records[r].fields[i].second);
    }
    os << '}';
  }
  os << "\n]\n";
}

inline void emit(std::ostream& os, const std::vector<std::string>& schema,
                 const std::vector<Record>& records, OutputFormat format) {
  if (format == OutputFormat::Csv) emit_csv(os, schema, records);
  else emit_json(os, schema, records);
}

inline void emit(std::ostream& os, const std::vector<Record>& records, OutputFormat format) {
  emit(os, detail::schema_of(records), records, format);
}

}  // namespace tube
