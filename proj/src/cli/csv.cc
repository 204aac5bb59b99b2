#include "sparse_polyak/cli/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sparse_polyak/errors.h"
#include "sparse_polyak/metrics.h"

namespace sparse_polyak::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view token) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.remove_suffix(1);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

NumericTable parse_numeric_csv(std::string_view text, const std::string& source) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty()) throw DataError(source, 1, 0, "empty file");

  NumericTable table;
  std::size_t first_data = 0;
  const std::vector<std::string_view> head = split_cells(lines[0]);
  bool any_numeric = false;
  for (std::string_view cell : head) any_numeric = any_numeric || parse_double(cell).has_value();
  if (!any_numeric) {
    for (std::string_view cell : head) table.header.emplace_back(cell);
    first_data = 1;
  }

  const std::size_t rows = lines.size() - first_data;
  if (rows == 0) throw DataError(source, lines.size(), 0, "no data rows");
  const std::size_t cols = head.size();
  table.data.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t line_no = first_data + r + 1;
    const std::vector<std::string_view> cells = split_cells(lines[first_data + r]);
    if (cells.size() != cols) {
      throw DataError(source, line_no, 0,
                      "expected " + std::to_string(cols) + " cells, found " +
                          std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const std::optional<double> v = parse_double(cells[c]);
      if (!v) {
        throw DataError(source, line_no, c + 1,
                        "not a finite number: '" + std::string(cells[c]) + "'");
      }
      table.data(static_cast<Index>(r), static_cast<Index>(c)) = *v;
    }
  }
  return table;
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  return parse_numeric_csv(read_text_file(path), path.string());
}

void write_numeric_csv(std::ostream& out, const std::vector<std::string>& header,
                       const DenseMatrix& data) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  if (!header.empty()) out << '\n';
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) out << (c ? "," : "") << format_double(data(r, c));
    out << '\n';
  }
}

void write_numeric_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const DenseMatrix& data) {
  std::ostringstream buf;
  write_numeric_csv(buf, header, data);
  write_text_file(path, buf.str());
}

std::vector<std::string> indexed_header(std::string_view prefix, Index count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path.string() + " failed");
  return buf.str();
}

void write_trace_header(std::ostream& out, bool with_truth) {
  out << "label,seed,t,f,gamma,grad_ht_norm_sq,";
  if (with_truth) out << "err_sq_to_star,";
  out << "support_size";
  if (with_truth) out << ",tp,fp,fn";
  out << '\n';
}

void write_trace_rows(std::ostream& out, std::string_view label, std::uint64_t seed,
                      const RunTrace& trace, const TruthRef& truth, std::size_t t_offset) {
  for (const IterationRecord& r : trace.records) {
    out << label << ',' << seed << ',' << (r.t + t_offset) << ',' << format_double(r.f_value)
        << ',' << format_double(r.gamma) << ',' << format_double(r.grad_ht_norm_sq) << ',';
    if (truth.theta_star) {
      if (!r.error_to_ref) throw ParameterError("trace record lacks the error to theta*");
      out << format_double(*r.error_to_ref) << ',';
    }
    out << r.support.size();
    if (truth.theta_star) {
      const SupportMetrics m = support_metrics(r.support, *truth.support_star);
      out << ',' << m.true_positives << ',' << m.false_positives << ',' << m.false_negatives;
    }
    out << '\n';
  }
}

}  // namespace sparse_polyak::cli
