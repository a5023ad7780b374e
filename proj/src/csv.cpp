#include "svwc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace svwc::csv {

std::string
FormatDouble (double v)
{
  if (std::isnan (v))
    {
      return "nan";
    }
  if (std::isinf (v))
    {
      return v > 0 ? "inf" : "-inf";
    }
  std::array<char, 64> buf{};
  const auto res = std::to_chars (buf.data (), buf.data () + buf.size (), v);
  return std::string (buf.data (), res.ptr);
}

std::string
Escape (std::string_view field)
{
  if (field.find_first_of (",\"\n\r") == std::string_view::npos)
    {
      return std::string (field);
    }
  std::string out = "\"";
  for (char c : field)
    {
      if (c == '"')
        {
          out += '"';
        }
      out += c;
    }
  out += '"';
  return out;
}

Writer::Writer (std::vector<std::string> header)
  : m_columns (header.size ())
{
  if (header.empty ())
    {
      throw std::invalid_argument ("csv::Writer: header must not be empty");
    }
  for (const auto& h : header)
    {
      Field (std::string_view (h));
    }
  EndRow ();
}

void
Writer::Separator ()
{
  if (m_inRow > 0)
    {
      m_text += ',';
    }
  ++m_inRow;
}

Writer&
Writer::Field (std::string_view s)
{
  Separator ();
  m_text += Escape (s);
  return *this;
}

Writer&
Writer::Field (double v)
{
  Separator ();
  m_text += FormatDouble (v);
  return *this;
}

Writer&
Writer::Field (std::int64_t v)
{
  Separator ();
  m_text += std::to_string (v);
  return *this;
}

Writer&
Writer::Field (std::uint64_t v)
{
  Separator ();
  m_text += std::to_string (v);
  return *this;
}

Writer&
Writer::Field (bool v)
{
  Separator ();
  m_text += v ? "true" : "false";
  return *this;
}

void
Writer::EndRow ()
{
  if (m_inRow != m_columns)
    {
      throw std::logic_error ("csv::Writer: row width does not match the header");
    }
  m_text += '\n';
  m_inRow = 0;
}

std::size_t
Table::Column (std::string_view name) const
{
  for (std::size_t i = 0; i < header.size (); ++i)
    {
      if (header[i] == name)
        {
          return i;
        }
    }
  throw std::out_of_range ("csv::Table: no column named " + std::string (name));
}

Table
Parse (std::string_view text)
{
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool fieldStarted = false;
  for (std::size_t i = 0; i < text.size (); ++i)
    {
      const char c = text[i];
      if (quoted)
        {
          if (c == '"')
            {
              if (i + 1 < text.size () && text[i + 1] == '"')
                {
                  field += '"';
                  ++i;
                }
              else
                {
                  quoted = false;
                }
            }
          else
            {
              field += c;
            }
          continue;
        }
      switch (c)
        {
        case '"':
          quoted = true;
          fieldStarted = true;
          break;
        case ',':
          record.push_back (std::move (field));
          field.clear ();
          fieldStarted = true;
          break;
        case '\r':
          break;
        case '\n':
          if (fieldStarted || !field.empty () || !record.empty ())
            {
              record.push_back (std::move (field));
              records.push_back (std::move (record));
            }
          field.clear ();
          record.clear ();
          fieldStarted = false;
          break;
        default:
          field += c;
          fieldStarted = true;
        }
    }
  if (quoted)
    {
      throw std::runtime_error ("csv::Parse: unterminated quoted field");
    }
  if (fieldStarted || !record.empty ())
    {
      record.push_back (std::move (field));
      records.push_back (std::move (record));
    }
  if (records.empty ())
    {
      throw std::runtime_error ("csv::Parse: missing header row");
    }

  Table t;
  t.header = std::move (records.front ());
  for (std::size_t r = 1; r < records.size (); ++r)
    {
      if (records[r].size () != t.header.size ())
        {
          throw std::runtime_error ("csv::Parse: row " + std::to_string (r + 1) + " has "
                                    + std::to_string (records[r].size ()) + " fields, header has "
                                    + std::to_string (t.header.size ()));
        }
      t.rows.push_back (std::move (records[r]));
    }
  return t;
}

} // namespace svwc::csv
