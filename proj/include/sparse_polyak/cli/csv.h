#ifndef SPARSE_POLYAK_CLI_CSV_H_
#define SPARSE_POLYAK_CLI_CSV_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_polyak/core.h"
#include "sparse_polyak/datagen.h"
#include "sparse_polyak/solver.h"

namespace sparse_polyak::cli {

// 17 significant digits; parse_double(format_double(x)) == x for finite x.
std::string format_double(double x);

// Whole-token parse. std::nullopt for anything that is not a finite number.
std::optional<double> parse_double(std::string_view token);

struct NumericTable {
  std::vector<std::string> header;  // empty when the file has none
  DenseMatrix data;
};

// Comma-separated numeric table. The first line is a header iff none of its
// cells parse as numbers. Throws DataError (ragged rows, bad cells, empty
// file) with 1-based line and column, IoError if the file cannot be read.
NumericTable parse_numeric_csv(std::string_view text, const std::string& source);
NumericTable read_numeric_csv(const std::filesystem::path& path);

void write_numeric_csv(std::ostream& out, const std::vector<std::string>& header,
                       const DenseMatrix& data);
void write_numeric_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const DenseMatrix& data);

// Column names prefix0, prefix1, ...
std::vector<std::string> indexed_header(std::string_view prefix, Index count);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Ground-truth view used for the optional trace columns.
struct TruthRef {
  const DenseVector* theta_star = nullptr;
  const SupportSet* support_star = nullptr;
};

void write_trace_header(std::ostream& out, bool with_truth);

// One line per record, t shifted by t_offset. err_sq_to_star, tp, fp and fn
// appear iff truth.theta_star is set.
void write_trace_rows(std::ostream& out, std::string_view label, std::uint64_t seed,
                      const RunTrace& trace, const TruthRef& truth, std::size_t t_offset = 0);

}  // namespace sparse_polyak::cli

#endif  // SPARSE_POLYAK_CLI_CSV_H_
