#include "fixtures.hpp"

#include "urbanembed/core/ops.hpp"
#include "urbanembed/data/dataset.hpp"
#include "urbanembed/data/generator.hpp"
#include "urbanembed/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace urbanembed;
using urbanembed::testing::fixture_dir;
using urbanembed::testing::oracles;
using urbanembed::testing::TempDir;
using urbanembed::testing::to_matrix;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// A valid three-region city; individual tests overwrite one file.
void write_small_city(const std::filesystem::path& dir) {
  write_text(dir / "trips.csv", "origin_id,dest_id\n0,1\n1,2\n");
  write_text(dir / "poi.csv", "region_id,category,count\n0,a,1\n1,b,2\n2,a,3\n");
  write_text(dir / "checkins.csv", "region_id,category,count\n0,x,1\n");
  write_text(dir / "targets.csv", "region_id,checkin_total\n0,1\n1,2\n2,3\n");
}

std::string load_error(const std::filesystem::path& dir) {
  try {
    load_dataset(DatasetPaths::in_directory(dir));
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Dataset, DuplicatePoiRowsAreSummed) {
  const auto& o = oracles()["duplicate_poi"];
  const Dataset d = load_dataset(DatasetPaths::in_directory(fixture_dir() / o["directory"].get<std::string>()),
                                 o["n_regions"].get<std::size_t>());
  EXPECT_EQ(d.poi.categories, o["categories"].get<std::vector<std::string>>());
  EXPECT_EQ(d.poi.counts, to_matrix(o["poi_counts"]));
  EXPECT_EQ(d.trips.size(), 4u);
  ASSERT_TRUE(d.targets.crime_count.has_value());
  EXPECT_EQ((*d.targets.crime_count)[2], 3.0);
}

TEST(Dataset, RegionCountInferredFromTargets) {
  const auto& o = oracles()["duplicate_poi"];
  const Dataset d = load_dataset(DatasetPaths::in_directory(fixture_dir() / o["directory"].get<std::string>()));
  EXPECT_EQ(d.n_regions(), o["n_regions"].get<std::size_t>());
}

TEST(Dataset, ErrorsNameFileAndLine) {
  TempDir tmp;
  write_small_city(tmp.path());
  EXPECT_EQ(load_error(tmp.path()), "");

  write_text(tmp.path() / "trips.csv", "origin_id,dest_id\n0,1\n1,7\n");
  EXPECT_NE(load_error(tmp.path()).find("trips.csv line 3"), std::string::npos) << load_error(tmp.path());

  write_small_city(tmp.path());
  write_text(tmp.path() / "poi.csv", "region_id,category,count\n0,a,-1\n");
  EXPECT_NE(load_error(tmp.path()).find("poi.csv line 2"), std::string::npos) << load_error(tmp.path());

  write_small_city(tmp.path());
  write_text(tmp.path() / "targets.csv", "region_id,checkin_total\n0,1\n1,2\n1,2\n2,3\n");
  EXPECT_NE(load_error(tmp.path()).find("targets.csv"), std::string::npos);

  write_small_city(tmp.path());
  write_text(tmp.path() / "trips.csv", "origin,dest\n0,1\n");
  EXPECT_NE(load_error(tmp.path()).find("trips.csv"), std::string::npos);
}

TEST(Dataset, MissingFileIsDataError) {
  TempDir tmp;
  write_small_city(tmp.path());
  std::filesystem::remove(tmp.path() / "poi.csv");
  EXPECT_NE(load_error(tmp.path()).find("poi.csv"), std::string::npos);
}

TEST(Dataset, WriteThenLoadRoundTrips) {
  CityConfig c;
  c.n_regions = 12;
  c.n_districts = 3;
  c.n_trips = 300;
  const Dataset d = generate_city(c);
  TempDir tmp;
  write_dataset(d, tmp.path());
  EXPECT_EQ(load_dataset(DatasetPaths::in_directory(tmp.path())), d);
  EXPECT_THROW(write_dataset(d, tmp.path() / "missing"), std::runtime_error);
}

TEST(Generator, DeterministicPerSeed) {
  CityConfig c;
  EXPECT_EQ(generate_city(c), generate_city(c));
  CityConfig other = c;
  other.seed = 1;
  EXPECT_FALSE(generate_city(c) == generate_city(other));
}

TEST(Generator, ShapesFollowConfig) {
  CityConfig c;
  c.n_regions = 10;
  c.n_districts = 2;
  c.n_poi_categories = 5;
  c.n_checkin_categories = 6;
  c.n_trips = 123;
  const Dataset d = generate_city(c);
  EXPECT_EQ(d.n_regions(), 10u);
  EXPECT_EQ(d.trips.size(), 123u);
  EXPECT_EQ(d.poi.counts.cols(), 5);
  EXPECT_EQ(d.checkins.counts.cols(), 6);
  ASSERT_TRUE(d.regions.districts.has_value());
  EXPECT_EQ(d.regions.districts->size(), 10u);
  EXPECT_NO_THROW(d.validate());
}

TEST(Generator, NoiselessTripsStayInDistrict) {
  CityConfig c;
  c.noise_level = 0.0;
  const Dataset d = generate_city(c);
  const auto& districts = *d.regions.districts;
  for (const Trip& t : d.trips.trips) EXPECT_EQ(districts[t.origin], districts[t.destination]);
}

TEST(Generator, DeterministicTripsFormPermutation) {
  CityConfig c;
  c.deterministic_trips = true;
  const Dataset d = generate_city(c);
  std::vector<int> dest(c.n_regions, -1);
  for (const Trip& t : d.trips.trips) {
    if (dest[t.origin] < 0) dest[t.origin] = static_cast<int>(t.destination);
    EXPECT_EQ(dest[t.origin], static_cast<int>(t.destination));
  }
  std::vector<int> seen(c.n_regions, 0);
  for (int j : dest)
    if (j >= 0) ++seen[static_cast<std::size_t>(j)];
  for (int s : seen) EXPECT_LE(s, 1);
}

TEST(Generator, FeatureProfilesClusterByDistrict) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CityConfig c;
    c.seed = seed;
    const Dataset d = generate_city(c);
    const Matrix sim = pairwise_cosine(d.poi.counts);
    const auto& districts = *d.regions.districts;
    double within = 0, across = 0;
    int nw = 0, na = 0;
    for (std::size_t i = 0; i < c.n_regions; ++i) {
      for (std::size_t j = 0; j < c.n_regions; ++j) {
        if (i == j) continue;
        const double s = sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (districts[i] == districts[j]) {
          within += s;
          ++nw;
        } else {
          across += s;
          ++na;
        }
      }
    }
    EXPECT_GT(within / nw, across / na + 0.2) << "seed " << seed;
  }
}

TEST(Generator, RejectsBadConfig) {
  CityConfig c;
  c.n_districts = 0;
  EXPECT_THROW(generate_city(c), std::invalid_argument);
  c = CityConfig{};
  c.noise_level = 1.5;
  EXPECT_THROW(generate_city(c), std::invalid_argument);
}
