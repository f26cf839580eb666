#pragma once

#include "fastfrechet/core.hpp"
#include "fastfrechet/friso.hpp"
#include "fastfrechet/monotone_qp.hpp"
#include "fastfrechet/resampling.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fastfrechet {

/// Numeric CSV with a header row of column names.
struct CsvMatrix {
  std::vector<std::string> header;
  RowMatrix values;
};

/// Parses a header line plus numeric rows. Accepts inf/-inf/nan literals.
/// Throws ParseError naming the line number for ragged rows or bad cells,
/// and "no data rows" when nothing follows the header.
CsvMatrix read_matrix_csv(std::istream& in);
CsvMatrix read_matrix_csv(const std::filesystem::path& path);

/// Writes values with 17 significant digits, which round-trips binary64.
/// Default header is V1..Vp.
void write_matrix_csv(std::ostream& out, const RowMatrix& values,
                      const std::vector<std::string>& header = {});
void write_matrix_csv(const std::filesystem::path& path, const RowMatrix& values,
                      const std::vector<std::string>& header = {});

/// Shortest round-trip decimal form ("inf"/"-inf" for infinities).
std::string format_double(double value);

/// Parses a real including the literals inf, +inf, -inf (case-insensitive).
/// Throws InvalidArgument on trailing garbage.
double parse_double(const std::string& text);

/// "start:stop:step" (inclusive stop, tolerant to rounding) or "a,b,c".
std::vector<double> parse_tau_grid(const std::string& text);

nlohmann::ordered_json to_json(const SimplexWeights& weights);
nlohmann::ordered_json to_json(const FrisoResult& result);
nlohmann::ordered_json to_json(const PathResult& path);
nlohmann::ordered_json to_json(const CvReport& report);
nlohmann::ordered_json to_json(const StabilityReport& report);
nlohmann::ordered_json to_json(const IterationRecord& record);
nlohmann::ordered_json to_json(const std::vector<ActiveSet>& sets);

/// Tidy long-format tables.
/// Path: variable,tau,lambda (variables 1-based).
void write_path_csv(std::ostream& out, const PathResult& path);
/// CV: tau,cv_error.
void write_cv_csv(std::ostream& out, const CvReport& report);
/// Stability: variable,tau,proportion.
void write_stability_csv(std::ostream& out, const StabilityReport& report);

}  // namespace fastfrechet
