#include "urbanembed/data/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace urbanembed {

void CityConfig::validate() const {
  if (n_regions == 0) throw std::invalid_argument("generate_city: n_regions must be positive");
  if (n_districts == 0 || n_districts > n_regions) {
    throw std::invalid_argument("generate_city: need 1 <= n_districts <= n_regions");
  }
  if (n_poi_categories == 0 || n_checkin_categories == 0) {
    throw std::invalid_argument("generate_city: category counts must be positive");
  }
  if (n_trips == 0) throw std::invalid_argument("generate_city: n_trips must be positive");
  if (!(noise_level >= 0.0 && noise_level <= 1.0)) {
    throw std::invalid_argument("generate_city: noise_level must lie in [0, 1]");
  }
}

namespace {

constexpr double kPoiPerRegion = 80.0;
constexpr double kCheckinsPerRegion = 300.0;

// District d favours the categories c with c % n_districts == d.
Matrix district_profiles(std::size_t districts, std::size_t categories, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix profiles(static_cast<Eigen::Index>(districts), static_cast<Eigen::Index>(categories));
  for (std::size_t d = 0; d < districts; ++d) {
    for (std::size_t c = 0; c < categories; ++c) {
      const bool dominant = c % districts == d;
      profiles(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) =
          dominant ? 1.0 + unit(rng) : 0.25 * unit(rng);
    }
    profiles.row(static_cast<Eigen::Index>(d)) /= profiles.row(static_cast<Eigen::Index>(d)).sum();
  }
  return profiles;
}

Matrix region_rates(const Matrix& profiles, const std::vector<int>& district, double noise, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(district.size());
  Matrix rates(n, profiles.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd own(profiles.cols());
    for (Eigen::Index c = 0; c < own.size(); ++c) own(c) = unit(rng);
    own /= own.sum();
    rates.row(i) = (1.0 - noise) * profiles.row(district[static_cast<std::size_t>(i)]) + noise * own;
  }
  return rates;
}

FeatureTable sample_counts(const Matrix& rates, const std::vector<double>& size, double per_region,
                           const std::string& prefix, std::mt19937_64& rng) {
  FeatureTable table;
  table.counts = Matrix::Zero(rates.rows(), rates.cols());
  for (Eigen::Index c = 0; c < rates.cols(); ++c) table.categories.push_back(prefix + std::to_string(c));
  for (Eigen::Index i = 0; i < rates.rows(); ++i) {
    for (Eigen::Index c = 0; c < rates.cols(); ++c) {
      const double mean = per_region * size[static_cast<std::size_t>(i)] * rates(i, c);
      if (mean > 0.0) {
        std::poisson_distribution<long long> poisson(mean);
        table.counts(i, c) = static_cast<double>(poisson(rng));
      }
    }
  }
  return table;
}

std::vector<double> linear_target(const Matrix& features, double base, double spread, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector weights(features.cols());
  for (Eigen::Index c = 0; c < weights.size(); ++c) weights(c) = normal(rng);
  Vector signal = (features * weights).array() * spread + base;
  const double mean = signal.mean();
  const double sd = std::sqrt((signal.array() - mean).square().mean());
  // Signal-to-noise amplitude ratio 10:1.
  std::normal_distribution<double> noise(0.0, sd / 10.0);
  std::vector<double> out(static_cast<std::size_t>(signal.size()));
  for (Eigen::Index i = 0; i < signal.size(); ++i) out[static_cast<std::size_t>(i)] = signal(i) + noise(rng);
  return out;
}

}  // namespace

Dataset generate_city(const CityConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = config.n_regions;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> district(n);
  std::vector<std::vector<std::size_t>> members(config.n_districts);
  for (std::size_t k = 0; k < n; ++k) {
    const auto d = k % config.n_districts;
    district[order[k]] = static_cast<int>(d);
    members[d].push_back(order[k]);
  }

  std::vector<double> size(n);
  for (double& s : size) s = 0.75 + 0.5 * unit(rng);

  const Matrix poi_profiles = district_profiles(config.n_districts, config.n_poi_categories, rng);
  const Matrix checkin_profiles = district_profiles(config.n_districts, config.n_checkin_categories, rng);
  const Matrix poi_rates = region_rates(poi_profiles, district, config.noise_level, rng);
  const Matrix checkin_rates = region_rates(checkin_profiles, district, config.noise_level, rng);

  Dataset data;
  data.regions = RegionSet::numbered(n);
  data.regions.districts = district;
  data.poi = sample_counts(poi_rates, size, kPoiPerRegion, "poi_", rng);
  data.checkins = sample_counts(checkin_rates, size, kCheckinsPerRegion, "checkin_", rng);

  auto& trips = data.trips.trips;
  trips.reserve(config.n_trips);
  if (config.deterministic_trips) {
    std::vector<std::size_t> destination(n);
    for (const auto& group : members) {
      for (std::size_t k = 0; k < group.size(); ++k) destination[group[k]] = group[(k + 1) % group.size()];
    }
    for (std::size_t k = 0; k < config.n_trips; ++k) trips.push_back(Trip{k % n, destination[k % n]});
  } else {
    std::lognormal_distribution<double> attraction_dist(0.0, 1.0);
    std::vector<double> attraction(n);
    for (double& a : attraction) a = attraction_dist(rng);
    std::discrete_distribution<std::size_t> pick_origin(size.begin(), size.end());
    std::vector<std::discrete_distribution<std::size_t>> pick_local;
    for (const auto& group : members) {
      std::vector<double> w;
      for (std::size_t r : group) w.push_back(attraction[r]);
      pick_local.emplace_back(w.begin(), w.end());
    }
    std::uniform_int_distribution<std::size_t> pick_any(0, n - 1);
    for (std::size_t k = 0; k < config.n_trips; ++k) {
      const std::size_t origin = pick_origin(rng);
      std::size_t dest;
      if (unit(rng) < config.noise_level) {
        dest = pick_any(rng);
      } else {
        const auto d = static_cast<std::size_t>(district[origin]);
        dest = members[d][pick_local[d](rng)];
      }
      trips.push_back(Trip{origin, dest});
    }
  }

  Matrix profile(static_cast<Eigen::Index>(n), poi_rates.cols() + checkin_rates.cols());
  profile << poi_rates, checkin_rates;
  data.targets.checkin_total = linear_target(profile, 500.0, 2000.0, rng);
  data.targets.crime_count = linear_target(profile, 60.0, 300.0, rng);

  data.validate();
  return data;
}

}  // namespace urbanembed
