#pragma once

#include "urbanembed/data/dataset.hpp"

#include <cstdint>

namespace urbanembed {

/// Parameters of the synthetic city.
///
/// Regions are split into districts, each with its own POI and check-in
/// category profile. `noise_level` mixes a per-region random profile into
/// the features and a uniform destination into the trips; at 0 every trip
/// stays inside its origin's district.
struct CityConfig {
  std::size_t n_regions = 20;
  std::size_t n_districts = 4;
  std::size_t n_poi_categories = 8;
  std::size_t n_checkin_categories = 12;
  std::size_t n_trips = 4000;
  double noise_level = 0.1;
  std::uint64_t seed = 0;
  // Each origin always travels to one fixed destination (a cycle through its
  // district), so the OD map is a permutation.
  bool deterministic_trips = false;

  void validate() const;
};

Dataset generate_city(const CityConfig& config);

}  // namespace urbanembed
