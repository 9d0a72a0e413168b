#pragma once

#include <string>
#include <vector>

#include "gflsr/model.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

/// Exact parse; throws ConfigError on malformed input.
double parse_double(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Reads a UTF-8 CSV with a mandatory header row and numeric cells.
/// Errors name the offending row/column.
CsvTable load_csv_table(const std::string& path);

void save_csv_table(const std::string& path, const std::vector<std::string>& header,
                    const Matrix& values);

/// Loads a dataset whose header names the split: columns x1..xp then y1..yq.
Dataset load_dataset_csv(const std::string& path);

/// Loads a dataset from a plain numeric CSV given the predictor count; the
/// remaining columns are responses.
Dataset load_dataset_csv(const std::string& path, Index p);

/// Writes the raw (uncentered) values with the x1..xp, y1..yq header.
/// save followed by load reproduces the values bit-exactly.
void save_dataset_csv(const std::string& path, const Dataset& data);

}  // namespace gflsr
