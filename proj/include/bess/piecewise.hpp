#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace bess {

struct Breakpoint {
  double x;
  double y;
};

// Affine piece y = slope * x + intercept valid on [x_lo, x_hi].
struct Segment {
  double slope;
  double intercept;
  double x_lo;
  double x_hi;

  double operator()(double x) const { return slope * x + intercept; }
};

/// Piecewise-linear scalar function over ordered breakpoints.
///
/// Outside [x_min, x_max] the table saturates at the first/last value. Every
/// lookup table in the toolkit (resistance, OCV, derating, inverter loss and
/// the optimizer's heat curves) is one of these. Immutable once built.
class PwlTable {
 public:
  /// Sorts by x and validates: at least two points, pairwise distinct x.
  /// Throws TableError naming the offending x on duplicates.
  static PwlTable build(std::vector<Breakpoint> points);

  double eval(double x) const;

  /// n-1 affine pieces, in breakpoint order.
  std::vector<Segment> segments() const;

  std::span<const Breakpoint> breakpoints() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double x_min() const { return points_.front().x; }
  double x_max() const { return points_.back().x; }

  bool is_strictly_increasing() const;
  bool is_non_increasing() const;
  // Slopes non-decreasing (within tol).
  bool is_convex(double tol = 1e-12) const;

  /// Same breakpoints with every y multiplied by `factor`.
  PwlTable scaled(double factor) const;
  /// Same breakpoints with `offset` added to every y.
  PwlTable shifted(double offset) const;

 private:
  explicit PwlTable(std::vector<Breakpoint> points) : points_(std::move(points)) {}
  std::vector<Breakpoint> points_;
};

inline PwlTable pwl_build(std::vector<Breakpoint> points) { return PwlTable::build(std::move(points)); }
inline double pwl_eval(const PwlTable& table, double x) { return table.eval(x); }
inline std::vector<Segment> pwl_segments(const PwlTable& table) { return table.segments(); }

/// Two-column CSV (x,y); a non-numeric first row is treated as a header.
PwlTable load_pwl_csv(const std::filesystem::path& path);

}  // namespace bess
