#include "evidence/dataio/dataset.hpp"
#include "evidence/errors.hpp"
#include "evidence/numkit/special.hpp"
#include "evidence/numkit/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

using namespace evidence;
namespace fs = std::filesystem;

namespace {

using numkit::Vector;
const fs::path kData = EVIDENCE_TEST_DATA_DIR;

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("evidence_dataio_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST(Dataio, BundledShapes) {
  const auto pima = dataio::load_bundled(kData, "pima");
  EXPECT_EQ(pima.rows(), 532u);
  EXPECT_EQ(pima.columns.size(), 8u);
  EXPECT_EQ(pima.checksum.size(), 64u);
  const auto crime = dataio::load_bundled(kData, "uscrime");
  EXPECT_EQ(crime.rows(), 47u);
  const auto y = pima.column("diabetes");
  for (Eigen::Index i = 0; i < y.size(); ++i) EXPECT_TRUE(y[i] == 0.0 || y[i] == 1.0);
}

TEST(Dataio, UnknownNameAndColumn) {
  EXPECT_THROW(dataio::load_bundled(kData, "iris"), DataError);
  const auto pima = dataio::load_bundled(kData, "pima");
  EXPECT_THROW(pima.column("height"), DataError);
}

TEST(Dataio, ChecksumMismatchIsRejected) {
  const fs::path d = scratch_dir("checksum");
  fs::copy_file(kData / "MANIFEST.csv", d / "MANIFEST.csv");
  std::ifstream in(kData / "pima.csv", std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  write(d / "pima.csv", text);
  try {
    dataio::load_bundled(d, "pima");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos) << e.what();
  }
}

TEST(Dataio, CsvErrorsNameLineAndColumn) {
  const fs::path d = scratch_dir("csv");
  write(d / "bad.csv", "a,b\n1,2\n3,oops\n");
  try {
    dataio::load_csv(d / "bad.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("b"), std::string::npos) << msg;
  }
  write(d / "short.csv", "a,b\n1,2\n");
  EXPECT_THROW(dataio::load_csv(d / "short.csv", {{"a", "c"}, std::nullopt}), DataError);
  EXPECT_THROW(dataio::load_csv(d / "short.csv", {{}, 5}), DataError);
  EXPECT_THROW(dataio::load_csv(d / "missing.csv"), DataError);
}

TEST(Dataio, Sha256KnownVector) {
  EXPECT_EQ(dataio::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Dataio, StandardizeGlucose) {
  const auto pima = dataio::load_bundled(kData, "pima");
  const auto sd = dataio::standardize(pima, {"glu"});
  const auto g = sd.column("glu");
  const std::vector<double> v(g.data(), g.data() + g.size());
  EXPECT_LT(std::abs(numkit::mean(v)), 1e-12);
  EXPECT_LT(std::abs(numkit::stddev(v) - 1.0), 1e-12);
  ASSERT_EQ(sd.transforms.size(), 1u);
  EXPECT_EQ(sd.transforms[0].column, "glu");
  // other columns untouched
  EXPECT_EQ(sd.column("bmi"), pima.column("bmi"));
}

TEST(Dataio, EpilepsyPanel) {
  const auto panel = dataio::load_epilepsy(kData / "epilepsy.csv");
  EXPECT_EQ(panel.rows(), 58u * 5u);
  const auto subj = panel.column("subject");
  const auto period = panel.column("period");
  const auto offset = panel.column("offset");
  std::set<int> subjects;
  for (Eigen::Index r = 0; r < subj.size(); ++r) {
    subjects.insert(static_cast<int>(subj[r]));
    EXPECT_DOUBLE_EQ(offset[r], period[r] == 0.0 ? 8.0 : 2.0);
  }
  EXPECT_EQ(subjects.size(), 58u);
  EXPECT_FALSE(subjects.contains(dataio::kEpilepsyOutlierSubject));
  EXPECT_EQ(dataio::load_epilepsy(kData / "epilepsy.csv", false).rows(), 59u * 5u);
}

TEST(Dataio, BernoulliSyntheticResponseRate) {
  const std::size_t n = 2000, p = 11;
  const auto ds = dataio::make_bernoulli_synthetic(n, p, 5);
  EXPECT_EQ(ds.rows(), n);
  EXPECT_EQ(ds.columns.size(), p + 1);
  const Vector b = dataio::bernoulli_true_coefficients(p);
  ASSERT_EQ(b.size(), static_cast<Eigen::Index>(p + 1));
  double implied = 0.0, observed = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double lin = b[0];
    for (std::size_t j = 0; j < p; ++j) lin += b[static_cast<Eigen::Index>(j + 1)] * ds.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
    implied += numkit::norm_cdf(lin);
    observed += ds.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p));
  }
  implied /= n;
  observed /= n;
  EXPECT_NEAR(observed, implied, 3.0 * std::sqrt(implied * (1 - implied) / n));
  // same seed, same bytes
  EXPECT_EQ(dataio::make_bernoulli_synthetic(n, p, 5).values, ds.values);
}

TEST(Dataio, LinregSynthetic) {
  const auto ds = dataio::make_linreg_synthetic(47, 8, 20240607);
  EXPECT_EQ(ds.rows(), 47u);
  EXPECT_TRUE(ds.has_column("x8"));
  EXPECT_TRUE(ds.has_column("y"));
}
