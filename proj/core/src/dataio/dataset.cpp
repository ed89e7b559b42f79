#include "evidence/dataio/dataset.hpp"

#include "evidence/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace evidence::dataio {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

// Splits on commas outside double quotes.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(line.substr(start)));
  return out;
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
  // trailing blank lines
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

bool Dataset::has_column(std::string_view column) const {
  return std::find(columns.begin(), columns.end(), column) != columns.end();
}

Eigen::Index Dataset::column_index(std::string_view column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) {
    throw DataError("dataset '" + name + "' has no column '" + std::string(column) + "'");
  }
  return static_cast<Eigen::Index>(it - columns.begin());
}

Vector Dataset::column(std::string_view column) const { return values.col(column_index(column)); }

Matrix Dataset::select(const std::vector<std::string>& cols) const {
  Matrix out(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = values.col(column_index(cols[j]));
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  const std::string text = read_file(path);
  const std::string where = path.string();
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError(where + ": empty file (no header row)");

  Dataset ds;
  ds.name = path.stem().string();
  ds.checksum = sha256_hex(text);
  ds.provenance = "loaded from " + path.filename().string();
  for (auto field : split_fields(lines[0])) ds.columns.emplace_back(field);
  for (const auto& required : schema.required_columns) {
    if (!ds.has_column(required)) throw DataError(where + ": missing column '" + required + "'");
  }

  const std::size_t n_rows = lines.size() - 1;
  if (schema.expected_rows && *schema.expected_rows != n_rows) {
    throw DataError(where + ": expected " + std::to_string(*schema.expected_rows) +
                    " data rows, found " + std::to_string(n_rows));
  }
  const auto n_cols = static_cast<Eigen::Index>(ds.columns.size());
  ds.values.resize(static_cast<Eigen::Index>(n_rows), n_cols);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    const std::string line_no = std::to_string(r + 2);
    if (static_cast<Eigen::Index>(fields.size()) != n_cols) {
      throw DataError(where + ":" + line_no + ": expected " + std::to_string(n_cols) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      const std::string_view cell = fields[static_cast<std::size_t>(c)];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw DataError(where + ":" + line_no + ": column '" + ds.columns[static_cast<std::size_t>(c)] +
                        "' has non-numeric cell '" + std::string(cell) + "'");
      }
      ds.values(static_cast<Eigen::Index>(r), c) = v;
    }
  }
  return ds;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& manifest_csv) {
  const std::string text = read_file(manifest_csv);
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError(manifest_csv.string() + ": empty manifest");
  const auto header = split_fields(lines[0]);
  std::map<std::string, std::size_t, std::less<>> idx;
  for (std::size_t i = 0; i < header.size(); ++i) idx[std::string(header[i])] = i;
  for (const char* key : {"name", "file", "sha256", "rows"}) {
    if (!idx.count(key)) throw DataError(manifest_csv.string() + ": missing column '" + key + "'");
  }
  std::vector<ManifestEntry> out;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = split_fields(lines[r]);
    if (f.size() != header.size()) {
      throw DataError(manifest_csv.string() + ":" + std::to_string(r + 1) + ": wrong field count");
    }
    ManifestEntry e;
    e.name = std::string(f[idx["name"]]);
    e.file = std::string(f[idx["file"]]);
    e.sha256 = std::string(f[idx["sha256"]]);
    e.rows = std::stoul(std::string(f[idx["rows"]]));
    if (idx.count("source")) e.source = std::string(f[idx["source"]]);
    out.push_back(std::move(e));
  }
  return out;
}

Dataset load_bundled(const std::filesystem::path& data_dir, std::string_view name) {
  const auto manifest = load_manifest(data_dir / "MANIFEST.csv");
  const auto it = std::find_if(manifest.begin(), manifest.end(),
                               [&](const ManifestEntry& e) { return e.name == name; });
  if (it == manifest.end()) {
    throw DataError("dataset '" + std::string(name) + "' is not listed in " +
                    (data_dir / "MANIFEST.csv").string());
  }
  Dataset ds = load_csv(data_dir / it->file, CsvSchema{{}, it->rows});
  if (ds.checksum != it->sha256) {
    throw DataError("checksum mismatch for " + it->file + ": manifest " + it->sha256 + ", file " +
                    ds.checksum);
  }
  ds.name = it->name;
  ds.provenance = it->source;
  return ds;
}

Dataset standardize(const Dataset& ds, const std::vector<std::string>& columns) {
  Dataset out = ds;
  const double n = static_cast<double>(ds.rows());
  if (ds.rows() < 2) throw DataError("standardize: need at least two rows");
  for (const auto& name : columns) {
    const Eigen::Index j = ds.column_index(name);
    const double center = ds.values.col(j).mean();
    const double ss = (ds.values.col(j).array() - center).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("standardize: column '" + name + "' has zero variance");
    out.values.col(j) = (ds.values.col(j).array() - center) / sd;
    out.transforms.push_back({name, center, sd});
  }
  return out;
}

Dataset load_epilepsy(const std::filesystem::path& path, bool remove_outlier) {
  const Dataset raw = load_csv(path, CsvSchema{{"subject", "period", "count", "treatment"}, {}});
  const Vector subject = raw.column("subject");
  const Vector period = raw.column("period");
  const Vector count = raw.column("count");
  const Vector treatment = raw.column("treatment");

  // Group rows per subject, preserving first-appearance order.
  std::vector<int> order;
  std::map<int, std::vector<Eigen::Index>> rows_of;
  for (Eigen::Index r = 0; r < raw.values.rows(); ++r) {
    const int s = static_cast<int>(subject[r]);
    if (!rows_of.count(s)) order.push_back(s);
    rows_of[s].push_back(r);
  }

  std::vector<std::array<double, 6>> rows;
  for (int s : order) {
    const auto& rs = rows_of[s];
    if (rs.size() != 5) {
      throw DataError(path.string() + ": subject " + std::to_string(s) + " has " +
                      std::to_string(rs.size()) + " records, expected 5 (baseline + 4 periods)");
    }
    std::array<bool, 5> seen{};
    for (auto r : rs) {
      const int t = static_cast<int>(period[r]);
      if (t < 0 || t > 4 || seen[static_cast<std::size_t>(t)]) {
        throw DataError(path.string() + ": subject " + std::to_string(s) + " has a bad or repeated period " +
                        std::to_string(t));
      }
      seen[static_cast<std::size_t>(t)] = true;
      if (treatment[r] != treatment[rs.front()]) {
        throw DataError(path.string() + ": subject " + std::to_string(s) + " changes treatment arm");
      }
    }
    if (remove_outlier && s == kEpilepsyOutlierSubject) continue;
    std::vector<Eigen::Index> sorted = rs;
    std::sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return period[a] < period[b]; });
    for (auto r : sorted) {
      const bool baseline = period[r] == 0.0;
      rows.push_back({static_cast<double>(s), period[r], count[r], baseline ? 0.0 : 1.0, treatment[r],
                      baseline ? 8.0 : 2.0});
    }
  }

  Dataset out;
  out.name = "epilepsy";
  out.columns = {"subject", "period", "count", "period_indicator", "treatment", "offset"};
  out.values.resize(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 6; ++c) out.values(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  out.checksum = raw.checksum;
  out.provenance = raw.provenance + (remove_outlier ? "; subject 49 removed" : "; all subjects");
  return out;
}

}  // namespace evidence::dataio
