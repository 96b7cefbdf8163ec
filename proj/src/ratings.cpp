#include "kpsupport/completion/ratings.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace kpsupport::completion {
namespace {

constexpr Index kJesterJokes = 100;
constexpr double kJesterMissing = 99.0;

[[noreturn]] void fail(const char* format, std::size_t line, const std::string& what) {
  throw std::runtime_error(std::string(format) + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line, char separator) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, separator)) fields.push_back(field);
  if (!line.empty() && line.back() == separator) fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_id(const std::string& raw, Index& out) {
  double v;
  if (!parse_number(raw, v) || v < 1 || v != std::floor(v) || v > 1e9) return false;
  out = static_cast<Index>(v);
  return true;
}

/// Applies last-wins deduplication and fixes the table dimensions.
void finish(RatingsTable& table, const char* format) {
  std::map<std::pair<Index, Index>, std::size_t> position;
  std::vector<Rating> unique;
  std::size_t duplicates = 0;
  for (const Rating& r : table.ratings) {
    const auto [it, inserted] = position.try_emplace({r.user, r.item}, unique.size());
    if (inserted) {
      unique.push_back(r);
    } else {
      unique[it->second] = r;
      ++duplicates;
    }
  }
  if (duplicates > 0)
    table.warnings.push_back(std::string(format) + ": " + std::to_string(duplicates) +
                             " duplicate (user, item) pairs; kept the last rating of each");
  table.ratings = std::move(unique);
  for (const Rating& r : table.ratings) {
    table.users = std::max(table.users, r.user);
    table.items = std::max(table.items, r.item);
  }
}

RatingsTable open_and_ingest(const std::filesystem::path& path, RatingsTable (*ingest)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ingest(in);
}

}  // namespace

MaskedMatrix RatingsTable::to_masked() const {
  Mat values = Mat::Zero(users, items);
  Mask mask = Mask::Constant(users, items, false);
  for (const Rating& r : ratings) {
    values(r.user - 1, r.item - 1) = r.value;
    mask(r.user - 1, r.item - 1) = true;
  }
  return {values, mask};
}

RatingsTable ingest_movielens(std::istream& in) {
  RatingsTable table;
  table.range = RatingRange(1.0, 5.0);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), '\t');
    if (fields.size() != 4) fail("movielens", number, "expected 4 tab-separated fields, found " +
                                                          std::to_string(fields.size()));
    Rating r{};
    double timestamp;
    if (!parse_id(fields[0], r.user)) fail("movielens", number, "bad user id '" + fields[0] + "'");
    if (!parse_id(fields[1], r.item)) fail("movielens", number, "bad item id '" + fields[1] + "'");
    if (!parse_number(fields[2], r.value)) fail("movielens", number, "bad rating '" + fields[2] + "'");
    if (r.value != std::floor(r.value) || r.value < 1 || r.value > 5)
      fail("movielens", number, "rating " + trim(fields[2]) + " is not an integer in [1, 5]");
    if (!parse_number(fields[3], timestamp)) fail("movielens", number, "bad timestamp '" + fields[3] + "'");
    table.ratings.push_back(r);
  }
  if (table.ratings.empty()) throw std::runtime_error("movielens: no ratings found");
  finish(table, "movielens");
  return table;
}

RatingsTable ingest_movielens(const std::filesystem::path& path) {
  return open_and_ingest(path, static_cast<RatingsTable (*)(std::istream&)>(&ingest_movielens));
}

RatingsTable ingest_jester(std::istream& in) {
  RatingsTable table;
  table.range = RatingRange(-10.0, 10.0);
  std::string line;
  std::size_t number = 0;
  Index user = 0;
  std::size_t count_mismatches = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != std::size_t(kJesterJokes) + 1)
      fail("jester", number, "expected 101 comma-separated fields, found " + std::to_string(fields.size()));
    double declared;
    if (!parse_number(fields[0], declared) || declared < 0 || declared != std::floor(declared))
      fail("jester", number, "bad rating count '" + fields[0] + "'");
    ++user;
    Index present = 0;
    for (Index j = 1; j <= kJesterJokes; ++j) {
      double v;
      if (!parse_number(fields[j], v)) fail("jester", number, "bad rating '" + fields[j] + "'");
      if (v == kJesterMissing) continue;
      if (v < -10 || v > 10) fail("jester", number, "rating " + trim(fields[j]) + " outside [-10, 10]");
      table.ratings.push_back({user, j, v});
      ++present;
    }
    if (present != static_cast<Index>(declared)) ++count_mismatches;
  }
  if (user == 0) throw std::runtime_error("jester: no rows found");
  if (count_mismatches > 0)
    table.warnings.push_back("jester: " + std::to_string(count_mismatches) +
                             " rows whose declared rating count differs from the ratings present");
  finish(table, "jester");
  // Every row is a user even when it has no ratings; every joke is an item.
  table.users = user;
  table.items = kJesterJokes;
  return table;
}

RatingsTable ingest_jester(const std::filesystem::path& path) {
  return open_and_ingest(path, static_cast<RatingsTable (*)(std::istream&)>(&ingest_jester));
}

}  // namespace kpsupport::completion
