#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace svwc::csv {

/// Shortest decimal that parses back to the same double.
std::string FormatDouble (double v);

/// RFC 4180 style: quote when the field holds a comma, quote or newline.
std::string Escape (std::string_view field);

/// Builds CSV text with LF line endings; the header is mandatory.
class Writer
{
public:
  explicit Writer (std::vector<std::string> header);

  Writer& Field (std::string_view s);
  /// without this a literal would bind to the bool overload
  Writer& Field (const char* s) { return Field (std::string_view (s)); }
  Writer& Field (double v);
  Writer& Field (std::int64_t v);
  Writer& Field (int v) { return Field (static_cast<std::int64_t> (v)); }
  Writer& Field (std::uint64_t v);
  Writer& Field (bool v);
  /// Terminates the current row; throws if its width differs from the header.
  void EndRow ();

  const std::string& Text () const { return m_text; }
  std::size_t Columns () const { return m_columns; }

private:
  void Separator ();

  std::string m_text;
  std::size_t m_columns;
  std::size_t m_inRow = 0;
};

struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name, throws std::out_of_range when absent.
  std::size_t Column (std::string_view name) const;
};

/// Parses CSV text with a header row. Handles quoted fields; tolerates CRLF.
Table Parse (std::string_view text);

} // namespace svwc::csv
