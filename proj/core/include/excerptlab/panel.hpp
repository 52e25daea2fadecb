// Panel data model: recordings, their constituent store tracks, and the
// monthly sales panel the estimators run on.
//
// A recording is one unit; it may appear as several store tracks (album
// cut, single, compilation) that share the audio.  One representative
// track is linked per recording, and treatment is defined by how the
// store's preview lengths moved across the policy date: a unit is treated
// only if every one of its tracks moved to a longer preview, control only
// if none moved.  Mixed cases are ambiguous and excluded from analysis.
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace excerptlab {

// Calendar date, used only for ordering (release-date tie breaks).
struct Date {
  int year{0};
  int month{1};
  int day{1};
  auto operator<=>(const Date&) const = default;
};

// Parses "YYYY-MM-DD".
Date parse_date(const std::string& iso);
std::string format_date(const Date& d);

struct Track {
  std::string track_id;
  std::string isrc;  // recording the track embodies
  double duration_s{0.0};
  Date release_date{};
  std::optional<double> preview_len_pre_s;   // before the policy date
  std::optional<double> preview_len_post_s;  // after the policy date
};

enum class TreatmentStatus { Control, Treated, Ambiguous };

struct Recording {
  std::string isrc;
  std::vector<Track> tracks;
  int first_release_year{0};
  double duration_s{0.0};  // representative track duration, see link below
  double sales_2009{0.0};  // pre-period popularity proxy
};

struct PanelObservation {
  std::string unit_id;
  int period{0};       // month index, ascending
  double outcome{0.0}; // raw level; estimators model log(outcome + 1)
  bool treated{false};
  bool post{false};
  int age_years{0};
  std::string cluster_id;
  bool popular_unit{false};
  bool popular_artist{false};
  std::optional<int> dose_decile;  // 1..10 when a dose measure is attached
};

struct PanelDataset {
  std::vector<PanelObservation> observations;
  std::vector<int> periods;  // sorted distinct period values
  int policy_period{0};
};

// Representative track: duration at the recording's median track duration
// (lower middle for even counts), ties broken by earliest release date,
// then smallest track id.  Throws DataError on a recording with no tracks.
const Track& link_representative_track(const Recording& rec);

// True when the spread of track durations within the recording stays
// strictly below `max_range_s`; recordings failing the screen mix
// different audio under one identifier and are dropped upstream.
bool screen_duration_range(const Recording& rec, double max_range_s = 5.0);

// Treatment from preview-length movement across the policy date.
// Throws DataError when any track is missing a preview length.
TreatmentStatus assign_treatment(const Recording& rec);

// Among recordings sharing an artist and title, picks the one with the
// highest reference-month sales; ties go to the earliest first release
// year, then the smallest isrc.  `reference_sales` is keyed by isrc and
// must cover every candidate.
const Recording& select_artist_title_representative(
    std::span<const Recording> candidates,
    const std::unordered_map<std::string, double>& reference_sales);

// log(y + 1); throws DataError for negative y.
double log1_outcome(double y);

enum class PopularityFlag { Unit, Artist };

// Splits into (unpopular, popular) by the chosen flag.  Boundary-inclusive
// classification happens where the flag is set, not here.
std::pair<PanelDataset, PanelDataset> split_by_popularity(
    const PanelDataset& ds, PopularityFlag flag);

// Structural checks: sorted distinct periods, nonnegative outcomes and
// ages, post consistent with the policy period, treatment constant within
// unit, dose deciles in 1..10, and a balanced panel unless
// `allow_unbalanced` is set.  Throws DataError on the first violation.
void validate_panel(const PanelDataset& ds, bool allow_unbalanced = false);

// Panel CSV with header
//   unit_id,period,outcome,treated,post,age_years,cluster_id,
//   popular_unit,popular_artist,dose_decile
// where dose_decile may be empty.  Loading validates the panel.
PanelDataset load_panel_csv(const std::string& path, int policy_period,
                            bool allow_unbalanced = false);
void save_panel_csv(const std::string& path, const PanelDataset& ds);

}  // namespace excerptlab
