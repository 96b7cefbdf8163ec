#pragma once

#include "kpsupport/completion/metrics.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace kpsupport::completion {

/// One rating; user and item ids are 1-based as in the source files.
struct Rating {
  Index user;
  Index item;
  double value;
};

struct RatingsTable {
  Index users = 0;
  Index items = 0;
  std::vector<Rating> ratings;
  RatingRange range{0.0, 1.0};
  std::vector<std::string> warnings;

  /// users x items matrix with a mask of the rated entries.
  MaskedMatrix to_masked() const;
};

/// MovieLens u.data: "user<TAB>item<TAB>rating<TAB>timestamp" per line,
/// ratings in {1, ..., 5}. A repeated (user, item) pair keeps the last rating
/// and records a warning. Malformed lines raise an error naming the line.
RatingsTable ingest_movielens(std::istream& in);
RatingsTable ingest_movielens(const std::filesystem::path& path);

/// Jester: comma-separated rows of a rating count followed by 100 ratings in
/// [-10, 10], where 99 marks a missing rating. Row r is user r.
RatingsTable ingest_jester(std::istream& in);
RatingsTable ingest_jester(const std::filesystem::path& path);

}  // namespace kpsupport::completion
