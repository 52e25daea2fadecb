#include "excerptlab/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "excerptlab/csv.hpp"
#include "excerptlab/errors.hpp"

namespace excerptlab {

Date parse_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  std::istringstream ss(iso);
  ss >> y >> dash1 >> m >> dash2 >> d;
  if (!ss || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 ||
      d > 31)
    throw DataError("malformed date '" + iso + "', expected YYYY-MM-DD");
  return Date{y, m, d};
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

const Track& link_representative_track(const Recording& rec) {
  if (rec.tracks.empty())
    throw DataError("recording '" + rec.isrc + "' has no tracks");
  std::vector<const Track*> by_duration;
  by_duration.reserve(rec.tracks.size());
  for (const auto& t : rec.tracks) by_duration.push_back(&t);
  std::sort(by_duration.begin(), by_duration.end(),
            [](const Track* a, const Track* b) {
              if (a->duration_s != b->duration_s)
                return a->duration_s < b->duration_s;
              if (a->release_date != b->release_date)
                return a->release_date < b->release_date;
              return a->track_id < b->track_id;
            });
  // Lower middle for even counts keeps the median an actual track.
  const std::size_t mid = (by_duration.size() - 1) / 2;
  const double med_duration = by_duration[mid]->duration_s;
  // Among tracks at the median duration, earliest release wins, then id.
  const Track* best = nullptr;
  for (const Track* t : by_duration) {
    if (t->duration_s != med_duration) continue;
    if (!best || t->release_date < best->release_date ||
        (t->release_date == best->release_date && t->track_id < best->track_id))
      best = t;
  }
  return *best;
}

bool screen_duration_range(const Recording& rec, double max_range_s) {
  if (rec.tracks.empty())
    throw DataError("recording '" + rec.isrc + "' has no tracks");
  double lo = rec.tracks.front().duration_s;
  double hi = lo;
  for (const auto& t : rec.tracks) {
    lo = std::min(lo, t.duration_s);
    hi = std::max(hi, t.duration_s);
  }
  return (hi - lo) < max_range_s;
}

TreatmentStatus assign_treatment(const Recording& rec) {
  if (rec.tracks.empty())
    throw DataError("recording '" + rec.isrc + "' has no tracks");
  bool all_equal = true;
  bool all_longer = true;
  for (const auto& t : rec.tracks) {
    if (!t.preview_len_pre_s || !t.preview_len_post_s)
      throw DataError("track '" + t.track_id + "' of recording '" + rec.isrc +
                      "' is missing a preview length");
    const double pre = *t.preview_len_pre_s;
    const double post = *t.preview_len_post_s;
    if (post != pre) all_equal = false;
    if (!(post > pre)) all_longer = false;
  }
  if (all_equal) return TreatmentStatus::Control;
  if (all_longer) return TreatmentStatus::Treated;
  return TreatmentStatus::Ambiguous;
}

const Recording& select_artist_title_representative(
    std::span<const Recording> candidates,
    const std::unordered_map<std::string, double>& reference_sales) {
  if (candidates.empty())
    throw DataError("no candidate recordings to select from");
  const Recording* best = nullptr;
  double best_sales = 0.0;
  for (const auto& rec : candidates) {
    auto it = reference_sales.find(rec.isrc);
    if (it == reference_sales.end())
      throw DataError("no reference sales for recording '" + rec.isrc + "'");
    const double sales = it->second;
    if (!best || sales > best_sales ||
        (sales == best_sales &&
         (rec.first_release_year < best->first_release_year ||
          (rec.first_release_year == best->first_release_year &&
           rec.isrc < best->isrc)))) {
      best = &rec;
      best_sales = sales;
    }
  }
  return *best;
}

double log1_outcome(double y) {
  if (!(y >= 0.0))
    throw DataError("outcome must be nonnegative, got " + std::to_string(y));
  return std::log1p(y);
}

std::pair<PanelDataset, PanelDataset> split_by_popularity(
    const PanelDataset& ds, PopularityFlag flag) {
  PanelDataset lo, hi;
  lo.policy_period = hi.policy_period = ds.policy_period;
  for (const auto& obs : ds.observations) {
    const bool popular =
        flag == PopularityFlag::Unit ? obs.popular_unit : obs.popular_artist;
    (popular ? hi : lo).observations.push_back(obs);
  }
  auto rebuild_periods = [](PanelDataset& d) {
    std::set<int> ps;
    for (const auto& o : d.observations) ps.insert(o.period);
    d.periods.assign(ps.begin(), ps.end());
  };
  rebuild_periods(lo);
  rebuild_periods(hi);
  return {std::move(lo), std::move(hi)};
}

void validate_panel(const PanelDataset& ds, bool allow_unbalanced) {
  if (ds.observations.empty()) throw DataError("panel has no observations");
  if (!std::is_sorted(ds.periods.begin(), ds.periods.end()) ||
      std::adjacent_find(ds.periods.begin(), ds.periods.end()) !=
          ds.periods.end())
    throw DataError("panel periods must be sorted and distinct");
  std::set<int> period_set(ds.periods.begin(), ds.periods.end());
  std::map<std::string, std::set<int>> unit_periods;
  std::map<std::string, bool> unit_treated;
  for (const auto& obs : ds.observations) {
    if (!period_set.count(obs.period))
      throw DataError("unit '" + obs.unit_id + "' has period " +
                      std::to_string(obs.period) +
                      " outside the panel period list");
    if (!(obs.outcome >= 0.0))
      throw DataError("unit '" + obs.unit_id + "' period " +
                      std::to_string(obs.period) + " has negative outcome");
    if (obs.age_years < 0)
      throw DataError("unit '" + obs.unit_id + "' has negative age");
    const bool expect_post = obs.period >= ds.policy_period;
    if (obs.post != expect_post)
      throw DataError("unit '" + obs.unit_id + "' period " +
                      std::to_string(obs.period) +
                      " has post flag inconsistent with the policy period");
    if (obs.dose_decile && (*obs.dose_decile < 1 || *obs.dose_decile > 10))
      throw DataError("unit '" + obs.unit_id + "' has dose decile " +
                      std::to_string(*obs.dose_decile) + " outside 1..10");
    auto [it, inserted] = unit_treated.emplace(obs.unit_id, obs.treated);
    if (!inserted && it->second != obs.treated)
      throw DataError("unit '" + obs.unit_id +
                      "' switches treatment group mid-panel");
    if (!unit_periods[obs.unit_id].insert(obs.period).second)
      throw DataError("unit '" + obs.unit_id + "' has duplicate period " +
                      std::to_string(obs.period));
  }
  if (!allow_unbalanced) {
    for (const auto& [unit, ps] : unit_periods) {
      if (ps.size() != period_set.size())
        throw DataError("panel is unbalanced: unit '" + unit + "' has " +
                        std::to_string(ps.size()) + " of " +
                        std::to_string(period_set.size()) +
                        " periods (pass allow_unbalanced to accept)");
    }
  }
}

PanelDataset load_panel_csv(const std::string& path, int policy_period,
                            bool allow_unbalanced) {
  const CsvTable table = read_csv(path);
  const std::size_t c_unit = table.col("unit_id");
  const std::size_t c_period = table.col("period");
  const std::size_t c_outcome = table.col("outcome");
  const std::size_t c_treated = table.col("treated");
  const std::size_t c_post = table.col("post");
  const std::size_t c_age = table.col("age_years");
  const std::size_t c_cluster = table.col("cluster_id");
  const std::size_t c_pop_unit = table.col("popular_unit");
  const std::size_t c_pop_artist = table.col("popular_artist");
  const std::size_t c_dose = table.col("dose_decile");

  auto parse_int = [&](const std::string& s, const char* what) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DataError(std::string("panel csv: bad ") + what + " value '" + s +
                      "'");
    }
  };
  auto parse_real = [&](const std::string& s, const char* what) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw DataError(std::string("panel csv: bad ") + what + " value '" + s +
                      "'");
    }
  };
  auto parse_bool = [&](const std::string& s, const char* what) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw DataError(std::string("panel csv: bad ") + what + " value '" + s +
                    "', expected 0 or 1");
  };

  PanelDataset ds;
  ds.policy_period = policy_period;
  std::set<int> periods;
  ds.observations.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    PanelObservation obs;
    obs.unit_id = row[c_unit];
    obs.period = parse_int(row[c_period], "period");
    obs.outcome = parse_real(row[c_outcome], "outcome");
    obs.treated = parse_bool(row[c_treated], "treated");
    obs.post = parse_bool(row[c_post], "post");
    obs.age_years = parse_int(row[c_age], "age_years");
    obs.cluster_id = row[c_cluster];
    obs.popular_unit = parse_bool(row[c_pop_unit], "popular_unit");
    obs.popular_artist = parse_bool(row[c_pop_artist], "popular_artist");
    if (!row[c_dose].empty())
      obs.dose_decile = parse_int(row[c_dose], "dose_decile");
    periods.insert(obs.period);
    ds.observations.push_back(std::move(obs));
  }
  ds.periods.assign(periods.begin(), periods.end());
  validate_panel(ds, allow_unbalanced);
  return ds;
}

void save_panel_csv(const std::string& path, const PanelDataset& ds) {
  std::ostringstream out;
  out << "unit_id,period,outcome,treated,post,age_years,cluster_id,"
         "popular_unit,popular_artist,dose_decile\n";
  char buf[64];
  for (const auto& obs : ds.observations) {
    std::snprintf(buf, sizeof buf, "%.17g", obs.outcome);
    out << obs.unit_id << ',' << obs.period << ',' << buf << ','
        << (obs.treated ? 1 : 0) << ',' << (obs.post ? 1 : 0) << ','
        << obs.age_years << ',' << obs.cluster_id << ','
        << (obs.popular_unit ? 1 : 0) << ',' << (obs.popular_artist ? 1 : 0)
        << ',';
    if (obs.dose_decile) out << *obs.dose_decile;
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace excerptlab
