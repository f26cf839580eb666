#include "fastfrechet/io.hpp"

#include "fastfrechet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fastfrechet {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

bool try_parse_double(std::string text, double& out) {
  text = trim(text);
  if (text.empty()) {
    return false;
  }
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "+infinity") {
    out = kInf;
    return true;
  }
  if (lower == "-inf" || lower == "-infinity") {
    out = -kInf;
    return true;
  }
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

void write_field(std::ostream& out, double v) { out << format_double(v); }

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  if (!try_parse_double(text, v)) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return v;
}

CsvMatrix read_matrix_csv(std::istream& in) {
  CsvMatrix out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> data;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    std::vector<std::string> fields = split_fields(trim(line));
    if (!have_header) {
      for (auto& f : fields) {
        out.header.push_back(unquote(f));
      }
      have_header = true;
      continue;
    }
    if (fields.size() != out.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(out.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!try_parse_double(fields[c], v)) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                         ": non-numeric cell '" + fields[c] + "'");
      }
      data.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) {
    throw ParseError("no data rows");
  }
  const auto cols = static_cast<Eigen::Index>(out.header.size());
  out.values = Eigen::Map<RowMatrix>(data.data(), static_cast<Eigen::Index>(rows), cols);
  return out;
}

CsvMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "' for reading");
  }
  try {
    return read_matrix_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_matrix_csv(std::ostream& out, const RowMatrix& values,
                      const std::vector<std::string>& header) {
  const Eigen::Index cols = values.cols();
  if (!header.empty() && header.size() != static_cast<std::size_t>(cols)) {
    throw InvalidArgument("CSV header has " + std::to_string(header.size()) + " names for " +
                          std::to_string(cols) + " columns");
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (j > 0) {
      out << ',';
    }
    out << (header.empty() ? "V" + std::to_string(j + 1) : header[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j > 0) {
        out << ',';
      }
      write_field(out, values(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const RowMatrix& values,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open '" + path.string() + "' for writing");
  }
  write_matrix_csv(out, values, header);
  if (!out) {
    throw ParseError("write to '" + path.string() + "' failed");
  }
}

std::vector<double> parse_tau_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream ss(text);
    while (std::getline(ss, part, ':')) {
      parts.push_back(part);
    }
    if (parts.size() != 3) {
      throw InvalidArgument("tau grid range must be start:stop:step, got '" + text + "'");
    }
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
      throw InvalidArgument("tau grid range needs finite start <= stop and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      grid.push_back(start + static_cast<double>(k) * step);
    }
  } else {
    std::string part;
    std::istringstream ss(text);
    while (std::getline(ss, part, ',')) {
      grid.push_back(parse_double(part));
    }
  }
  if (grid.empty()) {
    throw InvalidArgument("tau grid is empty");
  }
  return grid;
}

nlohmann::ordered_json to_json(const SimplexWeights& weights) {
  nlohmann::ordered_json j;
  j["tau"] = weights.tau();
  j["lambda"] = std::vector<double>(weights.lambda().begin(), weights.lambda().end());
  return j;
}

nlohmann::ordered_json to_json(const std::vector<ActiveSet>& sets) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& s : sets) {
    j.push_back(s.indices());
  }
  return j;
}

nlohmann::ordered_json to_json(const FrisoResult& result) {
  nlohmann::ordered_json j;
  j["tau"] = result.lambda.tau();
  j["lambda"] = std::vector<double>(result.lambda.lambda().begin(), result.lambda.lambda().end());
  std::vector<std::size_t> selected;
  for (Eigen::Index v = 0; v < result.lambda.lambda().size(); ++v) {
    if (result.lambda.lambda()[v] > 0.0) {
      selected.push_back(static_cast<std::size_t>(v) + 1);
    }
  }
  j["nonzero"] = selected;
  j["objective"] = result.objective;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["gradient_norm"] = result.gradient_norm;
  j["qp_iterations"] = result.qp_iterations;
  return j;
}

nlohmann::ordered_json to_json(const PathResult& path) {
  nlohmann::ordered_json j;
  j["tau_grid"] = path.tau_grid;
  nlohmann::ordered_json lambda = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < path.lambda.rows(); ++r) {
    std::vector<double> row(path.lambda.row(r).begin(), path.lambda.row(r).end());
    lambda.push_back(row);
  }
  j["lambda"] = std::move(lambda);
  j["objective"] = path.objective;
  j["iterations"] = path.iterations;
  std::vector<bool> converged(path.converged.begin(), path.converged.end());
  j["converged"] = converged;
  j["gradient_norm"] = path.gradient_norm;
  j["qp_iterations"] = path.qp_iterations;
  return j;
}

nlohmann::ordered_json to_json(const CvReport& report) {
  nlohmann::ordered_json j;
  j["tau_grid"] = report.tau_grid;
  j["cv_error"] = report.cv_error;
  j["tau_star"] = report.tau_star;
  j["fold_assignments"] = report.fold_assignments;
  j["K"] = report.K;
  j["seed"] = report.seed;
  return j;
}

nlohmann::ordered_json to_json(const StabilityReport& report) {
  nlohmann::ordered_json j;
  j["tau_grid"] = report.tau_grid;
  nlohmann::ordered_json props = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < report.proportions.rows(); ++r) {
    std::vector<double> row(report.proportions.row(r).begin(), report.proportions.row(r).end());
    props.push_back(row);
  }
  j["proportions"] = std::move(props);
  j["max_proportion"] =
      std::vector<double>(report.max_proportion.begin(), report.max_proportion.end());
  std::vector<std::size_t> selected;
  for (std::size_t v : report.selected) {
    selected.push_back(v + 1);
  }
  j["selected"] = selected;
  j["B"] = report.B;
  j["pi_threshold"] = report.pi_threshold;
  j["selection_cutoff"] = report.selection_cutoff;
  j["seed"] = report.seed;
  return j;
}

nlohmann::ordered_json to_json(const IterationRecord& record) {
  nlohmann::ordered_json j;
  j["iteration"] = record.iteration;
  j["objective"] = record.objective;
  j["gradient_norm"] = record.gradient_norm;
  j["step"] = record.step;
  j["backtracks"] = record.backtracks;
  j["active_set_changes"] = record.active_set_changes;
  return j;
}

void write_path_csv(std::ostream& out, const PathResult& path) {
  out << "variable,tau,lambda\n";
  for (Eigen::Index k = 0; k < path.lambda.cols(); ++k) {
    for (Eigen::Index j = 0; j < path.lambda.rows(); ++j) {
      out << j + 1 << ',' << format_double(path.tau_grid[static_cast<std::size_t>(k)]) << ','
          << format_double(path.lambda(j, k)) << '\n';
    }
  }
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
  out << "tau,cv_error\n";
  for (std::size_t k = 0; k < report.tau_grid.size(); ++k) {
    out << format_double(report.tau_grid[k]) << ',' << format_double(report.cv_error[k]) << '\n';
  }
}

void write_stability_csv(std::ostream& out, const StabilityReport& report) {
  out << "variable,tau,proportion\n";
  for (Eigen::Index k = 0; k < report.proportions.cols(); ++k) {
    for (Eigen::Index j = 0; j < report.proportions.rows(); ++j) {
      out << j + 1 << ',' << format_double(report.tau_grid[static_cast<std::size_t>(k)]) << ','
          << format_double(report.proportions(j, k)) << '\n';
    }
  }
}

}  // namespace fastfrechet
