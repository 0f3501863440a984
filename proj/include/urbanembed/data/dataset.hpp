#pragma once

#include "urbanembed/core/tensor.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace urbanembed {

struct RegionSet {
  std::size_t count = 0;
  // External identifiers, names[i] for region i. Defaults to "0".."N-1".
  std::vector<std::string> ids;
  std::vector<std::string> names;
  // Land-use ground truth when known.
  std::optional<std::vector<int>> districts;

  static RegionSet numbered(std::size_t n);
  void validate() const;
  bool operator==(const RegionSet&) const = default;
};

struct Trip {
  std::size_t origin = 0;
  std::size_t destination = 0;
  bool operator==(const Trip&) const = default;
};

struct TripSet {
  std::vector<Trip> trips;

  std::size_t size() const { return trips.size(); }
  void validate(std::size_t n_regions) const;
  bool operator==(const TripSet&) const = default;
};

/// Non-negative per-region category counts (N x C).
struct FeatureTable {
  Matrix counts;
  std::vector<std::string> categories;

  void validate(std::size_t n_regions) const;
  bool operator==(const FeatureTable& other) const {
    return categories == other.categories && counts.rows() == other.counts.rows() &&
           counts.cols() == other.counts.cols() && counts == other.counts;
  }
};

struct TaskTargets {
  std::vector<double> checkin_total;
  // Absent when the targets file has no crime column.
  std::optional<std::vector<double>> crime_count;

  void validate(std::size_t n_regions) const;
  bool operator==(const TaskTargets&) const = default;
};

struct Dataset {
  RegionSet regions;
  TripSet trips;
  FeatureTable poi;
  FeatureTable checkins;
  TaskTargets targets;

  std::size_t n_regions() const { return regions.count; }
  void validate() const;
  bool operator==(const Dataset&) const = default;
};

struct DatasetPaths {
  // Optional sidecar mapping external ids to dense indices.
  std::filesystem::path regions;
  std::filesystem::path trips;
  std::filesystem::path poi;
  std::filesystem::path checkins;
  std::filesystem::path targets;

  // regions.csv, trips.csv, ... inside `dir`.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

/// Reads and validates a dataset. Without a regions file, ids in the other
/// files must be integers in [0, n_regions); n_regions = 0 takes the count
/// from the largest id in the targets file. Throws DataError naming the file
/// and line on any violation.
Dataset load_dataset(const DatasetPaths& paths, std::size_t n_regions = 0);

/// Writes the five CSV files into `dir`, which must already exist.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

}  // namespace urbanembed
