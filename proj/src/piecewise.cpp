#include "bess/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bess/csv.hpp"
#include "bess/errors.hpp"

namespace bess {

PwlTable PwlTable::build(std::vector<Breakpoint> points) {
  if (points.size() < 2) {
    throw TableError(fmt::format("piecewise table needs at least 2 breakpoints, got {}", points.size()));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].x > points[i - 1].x)) {
      throw TableError(fmt::format("duplicate breakpoint x = {}", points[i].x));
    }
  }
  return PwlTable(std::move(points));
}

double PwlTable::eval(double x) const {
  if (x <= points_.front().x) return points_.front().y;
  if (x >= points_.back().x) return points_.back().y;
  // First breakpoint strictly greater than x; x sits in [hi-1, hi).
  auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                             [](double v, const Breakpoint& p) { return v < p.x; });
  const Breakpoint& a = *(hi - 1);
  const Breakpoint& b = *hi;
  if (x == a.x) return a.y;
  const double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

std::vector<Segment> PwlTable::segments() const {
  std::vector<Segment> out;
  out.reserve(points_.size() - 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Breakpoint& a = points_[i];
    const Breakpoint& b = points_[i + 1];
    const double slope = (b.y - a.y) / (b.x - a.x);
    out.push_back({slope, a.y - slope * a.x, a.x, b.x});
  }
  return out;
}

bool PwlTable::is_strictly_increasing() const {
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (!(points_[i].y > points_[i - 1].y)) return false;
  return true;
}

bool PwlTable::is_non_increasing() const {
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (points_[i].y > points_[i - 1].y) return false;
  return true;
}

bool PwlTable::is_convex(double tol) const {
  const auto segs = segments();
  for (std::size_t i = 1; i < segs.size(); ++i)
    if (segs[i].slope < segs[i - 1].slope - tol * std::max(1.0, std::abs(segs[i - 1].slope))) return false;
  return true;
}

PwlTable PwlTable::scaled(double factor) const {
  std::vector<Breakpoint> pts = points_;
  for (auto& p : pts) p.y *= factor;
  return PwlTable(std::move(pts));
}

PwlTable PwlTable::shifted(double offset) const {
  std::vector<Breakpoint> pts = points_;
  for (auto& p : pts) p.y += offset;
  return PwlTable(std::move(pts));
}

PwlTable load_pwl_csv(const std::filesystem::path& path) {
  const auto rows = io::read_numeric_csv(path, 2);
  std::vector<Breakpoint> pts;
  pts.reserve(rows.size());
  for (const auto& r : rows) pts.push_back({r.values[0], r.values[1]});
  try {
    return PwlTable::build(std::move(pts));
  } catch (const TableError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()), path.string());
  }
}

}  // namespace bess
