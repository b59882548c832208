#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hsvm {

/// Parsed CSV: every column but "y" is a feature.
struct CsvTable {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;  ///< empty when the file has no "y" column
  bool has_labels() const { return labels.size() > 0; }
};

/// Sidecar schema, e.g. {"categorical": {"race": 3}}: the named columns hold
/// integer level codes 0..levels-1.
struct CsvSchema {
  std::map<std::string, std::size_t> categorical;
};

CsvSchema load_schema(const std::string& path);

/// Comma separated with a header row. Missing or non-numeric fields are a
/// DataError naming the row and column. Labels {1, 0} are mapped to {+1, -1}
/// with a warning; anything else outside {+1, -1} is a DataError.
CsvTable read_csv(const std::string& path, bool require_labels = true);
CsvTable parse_csv(const std::string& text, bool require_labels = true, const std::string& origin = "<csv>");

/// Level count per feature column (0 = continuous). Throws DataError for a
/// schema entry naming an absent column or a code outside its range.
std::vector<std::size_t> column_levels(const CsvTable& table, const CsvSchema& schema);

void write_csv(const std::string& path, const std::vector<std::string>& feature_names,
               const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

}  // namespace hsvm
