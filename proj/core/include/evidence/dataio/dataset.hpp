#pragma once

#include "evidence/numkit/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evidence::dataio {

using numkit::Matrix;
using numkit::Vector;

// Affine map applied to a column: stored = (raw - center) / scale.
struct ColumnTransform {
  std::string column;
  double center = 0.0;
  double scale = 1.0;
};

struct Dataset {
  std::string name;
  std::vector<std::string> columns;
  Matrix values;  // rows x columns
  std::string provenance;
  std::string checksum;  // sha-256 of the source bytes; empty for generated data
  std::vector<ColumnTransform> transforms;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  bool has_column(std::string_view column) const;
  Eigen::Index column_index(std::string_view column) const;
  Vector column(std::string_view column) const;
  Matrix select(const std::vector<std::string>& columns) const;
};

struct CsvSchema {
  std::vector<std::string> required_columns;
  std::optional<std::size_t> expected_rows;
};

// Parses a comma-separated file with a header row. Every cell must be
// numeric; failures name the file, line and column.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

struct ManifestEntry {
  std::string name;
  std::string file;
  std::string sha256;
  std::size_t rows = 0;
  std::string source;
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& manifest_csv);

// Loads `name` from a bundled data directory, verifying the pinned checksum
// and row count from data_dir/MANIFEST.csv.
Dataset load_bundled(const std::filesystem::path& data_dir, std::string_view name);

std::string sha256_hex(std::string_view bytes);

// Centres each listed column to mean 0 and scales to sample SD 1
// (denominator n - 1), recording the transform.
Dataset standardize(const Dataset& ds, const std::vector<std::string>& columns);

// Long-format epilepsy panel: one row per (subject, period) with columns
// subject, period, count, period_indicator, treatment, offset. Offsets are 8
// weeks at baseline and 2 weeks otherwise.
Dataset load_epilepsy(const std::filesystem::path& path, bool remove_outlier = true);

inline constexpr int kEpilepsyOutlierSubject = 49;

// Bernoulli probit data: n rows of p i.i.d. N(0,1) covariates x1..xp and a
// response y drawn from Bernoulli(Phi(b0 + x b)) with b = bernoulli_true_coefficients(p).
Dataset make_bernoulli_synthetic(std::size_t n, std::size_t p, std::uint64_t seed);
Vector bernoulli_true_coefficients(std::size_t p);

// Gaussian linear regression data: n rows of p i.i.d. N(0,1) covariates and
// y = b0 + x b + N(0, 0.5^2) with b = linreg_true_coefficients(p).
Dataset make_linreg_synthetic(std::size_t n, std::size_t p, std::uint64_t seed);
Vector linreg_true_coefficients(std::size_t p);

}  // namespace evidence::dataio
