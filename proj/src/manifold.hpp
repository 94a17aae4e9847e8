#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace hamreach {

enum class TimeFactor { None, Line, Circle };

// Phase-space descriptor: dimension 2d, per-coordinate periodicity, and an
// optional time factor. Coordinates are ordered x_1..x_d, p_1..p_d, then t
// when a time factor is present. The time circle has period 1.
class Manifold {
 public:
  Manifold(int d, std::vector<std::optional<double>> periods,
           TimeFactor time = TimeFactor::None);

  static std::shared_ptr<const Manifold> all_lines(int d, TimeFactor time = TimeFactor::None);
  static std::shared_ptr<const Manifold> torus(int d, double period,
                                               TimeFactor time = TimeFactor::None);

  int d() const { return d_; }
  int dim() const { return 2 * d_; }
  TimeFactor time() const { return time_; }
  bool has_time() const { return time_ != TimeFactor::None; }
  // Number of scalar variables an expression on this manifold may use.
  int var_count() const { return dim() + (has_time() ? 1 : 0); }
  int time_index() const { return dim(); }

  bool is_circle(int coord) const { return periods_[coord].has_value(); }
  double period(int coord) const { return *periods_[coord]; }
  // Compact iff every phase-space coordinate is a circle.
  bool compact() const;

  // Variable naming: index 0..d-1 -> x1..xd, d..2d-1 -> p1..pd, 2d -> t.
  std::string var_name(int index) const;

  // Wraps circle coordinates (and a periodic time slot) into [0, period).
  void reduce(std::span<double> coords) const;
  // Distance respecting circle wrap-around, sup-norm free: Euclidean on the
  // covering space with per-coordinate shortest representative.
  double distance(std::span<const double> a, std::span<const double> b) const;

  bool operator==(const Manifold& o) const;
  bool operator!=(const Manifold& o) const { return !(*this == o); }

 private:
  int d_;
  std::vector<std::optional<double>> periods_;  // size 2d
  TimeFactor time_;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

}  // namespace hamreach
