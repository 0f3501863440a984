#include "urbanembed/data/dataset.hpp"

#include "csv.hpp"
#include "urbanembed/error.hpp"

#include <charconv>
#include <fstream>
#include <unordered_map>

namespace urbanembed {

RegionSet RegionSet::numbered(std::size_t n) {
  RegionSet r;
  r.count = n;
  for (std::size_t i = 0; i < n; ++i) {
    r.ids.push_back(std::to_string(i));
    r.names.push_back("region_" + std::to_string(i));
  }
  return r;
}

void RegionSet::validate() const {
  if (count == 0) throw DataError("region set is empty");
  if (ids.size() != count || names.size() != count) throw DataError("region ids/names do not cover all regions");
  if (districts && districts->size() != count) throw DataError("district labels do not cover all regions");
}

void TripSet::validate(std::size_t n_regions) const {
  if (trips.empty()) throw DataError("trip set is empty");
  for (std::size_t k = 0; k < trips.size(); ++k) {
    if (trips[k].origin >= n_regions || trips[k].destination >= n_regions) {
      throw DataError("trip " + std::to_string(k) + " references a region outside [0, " +
                      std::to_string(n_regions) + ")");
    }
  }
}

void FeatureTable::validate(std::size_t n_regions) const {
  if (static_cast<std::size_t>(counts.rows()) != n_regions) {
    throw DataError("feature table has " + std::to_string(counts.rows()) + " rows for " + std::to_string(n_regions) +
                    " regions");
  }
  if (static_cast<std::size_t>(counts.cols()) != categories.size()) {
    throw DataError("feature table column count differs from category count");
  }
  if ((counts.array() < 0.0).any()) throw DataError("feature table has negative counts");
}

void TaskTargets::validate(std::size_t n_regions) const {
  if (checkin_total.size() != n_regions) throw DataError("check-in targets do not cover all regions");
  if (crime_count && crime_count->size() != n_regions) throw DataError("crime targets do not cover all regions");
}

void Dataset::validate() const {
  regions.validate();
  trips.validate(regions.count);
  poi.validate(regions.count);
  checkins.validate(regions.count);
  targets.validate(regions.count);
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return DatasetPaths{dir / "regions.csv", dir / "trips.csv", dir / "poi.csv", dir / "checkins.csv",
                      dir / "targets.csv"};
}

namespace {

using IdIndex = std::unordered_map<std::string, std::size_t>;

std::size_t lookup(const IdIndex& index, const csv::Table& t, std::size_t row, std::size_t col) {
  const std::string& id = t.row(row)[col];
  const auto it = index.find(id);
  if (it == index.end()) throw DataError(t.where(row) + "unknown region id '" + id + "'");
  return it->second;
}

RegionSet read_regions(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  const std::size_t id_col = t.column("id");
  const std::size_t name_col = t.column("name");
  const bool has_district = t.has_column("district");

  RegionSet r;
  r.count = t.row_count();
  if (r.count == 0) throw DataError(t.file_name() + ": no regions");
  std::vector<std::string> raw_districts;
  IdIndex seen;
  for (std::size_t i = 0; i < t.row_count(); ++i) {
    const std::string& id = t.row(i)[id_col];
    if (id.empty()) throw DataError(t.where(i) + "empty region id");
    if (!seen.emplace(id, i).second) throw DataError(t.where(i) + "duplicate region id '" + id + "'");
    r.ids.push_back(id);
    r.names.push_back(t.row(i)[name_col]);
    if (has_district) raw_districts.push_back(t.row(i)[t.column("district")]);
  }

  if (has_district) {
    // Integer labels are kept as-is; any other labels get dense codes in
    // order of first appearance.
    bool all_integer = true;
    std::vector<int> labels;
    for (std::size_t i = 0; i < raw_districts.size(); ++i) {
      const std::string& s = raw_districts[i];
      if (s.empty()) throw DataError(t.where(i) + "missing district label");
      int v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        all_integer = false;
        break;
      }
      labels.push_back(v);
    }
    if (!all_integer) {
      labels.clear();
      std::unordered_map<std::string, int> codes;
      for (const auto& s : raw_districts) {
        labels.push_back(codes.emplace(s, static_cast<int>(codes.size())).first->second);
      }
    }
    r.districts = std::move(labels);
  }
  return r;
}

FeatureTable read_features(const std::filesystem::path& path, const IdIndex& index, std::size_t n) {
  const auto t = csv::Table::read(path);
  const std::size_t region_col = t.column("region_id");
  const std::size_t category_col = t.column("category");
  const std::size_t count_col = t.column("count");

  std::unordered_map<std::string, std::size_t> category_index;
  std::vector<std::string> categories;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (std::size_t i = 0; i < t.row_count(); ++i) {
    const std::size_t region = lookup(index, t, i, region_col);
    const std::string& category = t.row(i)[category_col];
    if (category.empty()) throw DataError(t.where(i) + "empty category");
    const double count = t.number(i, count_col);
    if (count < 0.0) throw DataError(t.where(i) + "negative count " + t.row(i)[count_col]);
    auto [it, inserted] = category_index.emplace(category, categories.size());
    if (inserted) categories.push_back(category);
    entries.emplace_back(region, it->second, count);
  }

  FeatureTable table;
  table.categories = std::move(categories);
  table.counts = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(table.categories.size()));
  for (const auto& [region, category, count] : entries) {
    table.counts(static_cast<Eigen::Index>(region), static_cast<Eigen::Index>(category)) += count;
  }
  return table;
}

// Without a regions file, ids are 0..N-1 and targets list every region once.
std::size_t infer_region_count(const std::filesystem::path& targets) {
  const auto t = csv::Table::read(targets);
  const std::size_t col = t.column("region_id");
  long long top = -1;
  for (std::size_t i = 0; i < t.row_count(); ++i) {
    const long long id = t.integer(i, col);
    if (id < 0) throw DataError(t.where(i) + "negative region id");
    top = std::max(top, id);
  }
  if (top < 0) throw DataError(t.file_name() + ": no regions");
  return static_cast<std::size_t>(top + 1);
}

}  // namespace

Dataset load_dataset(const DatasetPaths& paths, std::size_t n_regions) {
  Dataset data;
  if (!paths.regions.empty() && std::filesystem::exists(paths.regions)) {
    data.regions = read_regions(paths.regions);
    if (n_regions != 0 && n_regions != data.regions.count) {
      throw DataError(paths.regions.filename().string() + ": lists " + std::to_string(data.regions.count) +
                      " regions, expected " + std::to_string(n_regions));
    }
  } else {
    if (n_regions == 0) n_regions = infer_region_count(paths.targets);
    data.regions = RegionSet::numbered(n_regions);
  }
  const std::size_t n = data.regions.count;
  IdIndex index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(data.regions.ids[i], i);

  {
    const auto t = csv::Table::read(paths.trips);
    const std::size_t o = t.column("origin_id");
    const std::size_t d = t.column("dest_id");
    data.trips.trips.reserve(t.row_count());
    for (std::size_t i = 0; i < t.row_count(); ++i) {
      data.trips.trips.push_back(Trip{lookup(index, t, i, o), lookup(index, t, i, d)});
    }
    if (data.trips.trips.empty()) throw DataError(t.file_name() + ": no trips");
  }

  data.poi = read_features(paths.poi, index, n);
  data.checkins = read_features(paths.checkins, index, n);

  {
    const auto t = csv::Table::read(paths.targets);
    const std::size_t region_col = t.column("region_id");
    const std::size_t checkin_col = t.column("checkin_total");
    const bool has_crime = t.has_column("crime_count");
    std::vector<double> checkin(n, 0.0), crime(n, 0.0);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < t.row_count(); ++i) {
      const std::size_t region = lookup(index, t, i, region_col);
      if (seen[region]) throw DataError(t.where(i) + "duplicate targets for region '" + t.row(i)[region_col] + "'");
      seen[region] = true;
      checkin[region] = t.number(i, checkin_col);
      if (has_crime) crime[region] = t.number(i, t.column("crime_count"));
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (!seen[r]) throw DataError(t.file_name() + ": no targets for region '" + data.regions.ids[r] + "'");
    }
    data.targets.checkin_total = std::move(checkin);
    if (has_crime) data.targets.crime_count = std::move(crime);
  }

  data.validate();
  return data;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_features(const FeatureTable& table, const RegionSet& regions, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "region_id,category,count\n";
  for (std::size_t r = 0; r < regions.count; ++r) {
    for (std::size_t c = 0; c < table.categories.size(); ++c) {
      out << regions.ids[r] << ',' << table.categories[c] << ','
          << csv::format_double(table.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) << '\n';
    }
  }
}

}  // namespace

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
  const auto paths = DatasetPaths::in_directory(dir);
  const RegionSet& regions = data.regions;
  {
    auto out = open_for_write(paths.regions);
    out << (regions.districts ? "id,name,district\n" : "id,name\n");
    for (std::size_t r = 0; r < regions.count; ++r) {
      out << regions.ids[r] << ',' << regions.names[r];
      if (regions.districts) out << ',' << (*regions.districts)[r];
      out << '\n';
    }
  }
  {
    auto out = open_for_write(paths.trips);
    out << "origin_id,dest_id\n";
    for (const Trip& trip : data.trips.trips) out << regions.ids[trip.origin] << ',' << regions.ids[trip.destination] << '\n';
  }
  write_features(data.poi, regions, paths.poi);
  write_features(data.checkins, regions, paths.checkins);
  {
    auto out = open_for_write(paths.targets);
    out << (data.targets.crime_count ? "region_id,checkin_total,crime_count\n" : "region_id,checkin_total\n");
    for (std::size_t r = 0; r < regions.count; ++r) {
      out << regions.ids[r] << ',' << csv::format_double(data.targets.checkin_total[r]);
      if (data.targets.crime_count) out << ',' << csv::format_double((*data.targets.crime_count)[r]);
      out << '\n';
    }
  }
}

}  // namespace urbanembed
