#pragma once

#include "dshrink/core_model.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dshrink {

/// Predictor columns in the order of the published variable table.
inline constexpr std::array<std::string_view, 8> kProstatePredictors = {
    "lcavol", "lweight", "age", "lbph", "svi", "lcp", "gleason", "pgg45"};
inline constexpr std::string_view kProstateResponse = "lpsa";
inline constexpr Index kProstateRows = 97;

struct ProstateFormat {
  /// 0 = detect from the header line (tab, comma, then whitespace).
  char delimiter = 0;
  /// Required row count; nullopt accepts any count.
  std::optional<Index> expected_rows = kProstateRows;
};

struct ProstateData {
  Dataset dataset;
  /// Contents of the optional train/test column. Carried only; never used to
  /// drop rows.
  std::optional<std::vector<bool>> train_flag;
};

/// Parses the delimiter-separated prostate file. A leading row-index column
/// (empty or index-like header) and a trailing "train" column are detected
/// from the header. Errors carry row/column coordinates.
ProstateData load_prostate(std::istream& in, const ProstateFormat& format = {});
ProstateData load_prostate_file(const std::string& path, const ProstateFormat& format = {});

/// Writes the normalized comma-separated form accepted by load_prostate.
void export_prostate(std::ostream& out, const ProstateData& data);

/// Generic loader: every column except `response` becomes a covariate.
Dataset load_table_dataset(std::istream& in, std::string_view response, char delimiter = 0);

}  // namespace dshrink
