#include "modcs/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "modcs/errors.hpp"

namespace modcs::io {

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

std::string matrix_to_csv(const DenseMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_real(a(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_real(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw InvalidArgument("matrix line " + std::to_string(line) + ": cannot parse '" +
                          std::string(field) + "' as a number");
  }
  return v;
}

}  // namespace

DenseMatrix matrix_from_csv(std::string_view text) {
  std::vector<double> entries;
  std::size_t rows = 0, cols = 0, line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::size_t fields = 0;
    for (;;) {
      const std::size_t comma = line.find(',');
      entries.push_back(parse_real(line.substr(0, comma), line_no));
      ++fields;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw DimensionMismatch("matrix line " + std::to_string(line_no) + " has " +
                              std::to_string(fields) + " fields, expected " +
                              std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw InvalidArgument("matrix file is empty");
  return DenseMatrix(rows, cols, std::move(entries));
}

DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return matrix_from_csv(buf.str());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

}  // namespace modcs::io
