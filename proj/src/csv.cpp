#include "hsvm/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hsvm/error.hpp"

namespace hsvm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string where(const std::string& origin, std::size_t line, const std::string& column) {
  return origin + ":" + std::to_string(line) + ", column '" + column + "'";
}

double parse_number(const std::string& field, const std::string& context) {
  if (field.empty()) throw DataError("missing value at " + context);
  double value = 0.0;
  const char* first = field.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError("non-numeric value '" + field + "' at " + context);
  }
  if (!std::isfinite(value)) throw DataError("missing or non-finite value '" + field + "' at " + context);
  return value;
}

}  // namespace

CsvSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("schema '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError("schema must be a JSON object");
  CsvSchema schema;
  for (const auto& [key, value] : j.items()) {
    if (key != "categorical") throw DataError("unknown schema key '" + key + "'");
    if (!value.is_object()) throw DataError("schema 'categorical' must map column names to level counts");
    for (const auto& [name, levels] : value.items()) {
      if (!levels.is_number_integer() || levels.get<long long>() < 2) {
        throw DataError("schema: column '" + name + "' needs an integer level count >= 2");
      }
      schema.categorical[name] = levels.get<std::size_t>();
    }
  }
  return schema;
}

CsvTable parse_csv(const std::string& text, bool require_labels, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw DataError(origin + ": empty file");

  std::ptrdiff_t label_col = -1;
  std::set<std::string> seen;
  CsvTable table;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw DataError(origin + ": empty column name at position " + std::to_string(c + 1));
    if (!seen.insert(header[c]).second) throw DataError(origin + ": duplicate column '" + header[c] + "'");
    if (header[c] == "y") {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      table.feature_names.push_back(header[c]);
    }
  }
  if (require_labels && label_col < 0) throw DataError(origin + ": no label column 'y'");

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(table.feature_names.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], where(origin, line_no, header[c]));
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        labels.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(origin + ": no data rows");

  table.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      table.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  if (label_col >= 0) {
    bool zero_one = true;
    bool plus_minus = true;
    for (double v : labels) {
      zero_one = zero_one && (v == 0.0 || v == 1.0);
      plus_minus = plus_minus && (v == 1.0 || v == -1.0);
    }
    if (!plus_minus && !zero_one) throw DataError(origin + ": labels must be in {+1, -1} or {1, 0}");
    if (!plus_minus) {
      log_warning(origin + ": labels {1, 0} mapped to {+1, -1}");
      for (double& v : labels) v = v == 1.0 ? 1.0 : -1.0;
    }
    table.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  }
  return table;
}

CsvTable read_csv(const std::string& path, bool require_labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str(), require_labels, path);
}

std::vector<std::size_t> column_levels(const CsvTable& table, const CsvSchema& schema) {
  std::vector<std::size_t> levels(table.feature_names.size(), 0);
  for (const auto& [name, count] : schema.categorical) {
    std::size_t c = 0;
    while (c < table.feature_names.size() && table.feature_names[c] != name) ++c;
    if (c == table.feature_names.size()) throw DataError("schema names column '" + name + "' absent from the CSV");
    levels[c] = count;
    for (Eigen::Index i = 0; i < table.features.rows(); ++i) {
      const double v = table.features(i, static_cast<Eigen::Index>(c));
      if (v != std::floor(v) || v < 0 || v >= static_cast<double>(count)) {
        throw DataError("column '" + name + "' row " + std::to_string(i + 1) + ": level code " +
                        std::to_string(v) + " outside [0, " + std::to_string(count) + ")");
      }
    }
  }
  return levels;
}

void write_csv(const std::string& path, const std::vector<std::string>& feature_names,
               const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  if (static_cast<Eigen::Index>(feature_names.size()) != features.cols() ||
      (labels.size() != 0 && labels.size() != features.rows())) {
    throw DimensionMismatch("write_csv: names, features and labels disagree");
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.precision(17);
  for (std::size_t c = 0; c < feature_names.size(); ++c) out << (c ? "," : "") << feature_names[c];
  if (labels.size() != 0) out << (feature_names.empty() ? "" : ",") << "y";
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) out << (c ? "," : "") << features(i, c);
    if (labels.size() != 0) out << (features.cols() ? "," : "") << static_cast<int>(labels[i]);
    out << '\n';
  }
}

}  // namespace hsvm
