#include "manifold.hpp"

#include <cmath>

namespace hamreach {

Manifold::Manifold(int d, std::vector<std::optional<double>> periods, TimeFactor time)
    : d_(d), periods_(std::move(periods)), time_(time) {
  if (d_ < 1) throw InvalidArgument("manifold half-dimension must be positive");
  if (static_cast<int>(periods_.size()) != 2 * d_)
    throw InvalidArgument("manifold needs one period entry per coordinate (2d)");
  for (const auto& p : periods_)
    if (p && *p <= 0.0) throw InvalidArgument("circle period must be positive");
}

std::shared_ptr<const Manifold> Manifold::all_lines(int d, TimeFactor time) {
  return std::make_shared<Manifold>(d, std::vector<std::optional<double>>(2 * d), time);
}

std::shared_ptr<const Manifold> Manifold::torus(int d, double period, TimeFactor time) {
  return std::make_shared<Manifold>(
      d, std::vector<std::optional<double>>(2 * d, std::optional<double>(period)), time);
}

bool Manifold::compact() const {
  for (const auto& p : periods_)
    if (!p) return false;
  return true;
}

std::string Manifold::var_name(int index) const {
  if (index < d_) return "x" + std::to_string(index + 1);
  if (index < 2 * d_) return "p" + std::to_string(index - d_ + 1);
  if (index == 2 * d_ && has_time()) return "t";
  throw InvalidArgument("variable index out of range");
}

namespace {
double wrap(double v, double period) {
  double r = std::fmod(v, period);
  if (r < 0) r += period;
  // fmod can return exactly `period` after the correction when v is a tiny
  // negative number; fold that case back to 0.
  if (r >= period) r -= period;
  return r;
}
}  // namespace

void Manifold::reduce(std::span<double> coords) const {
  for (int i = 0; i < dim() && i < static_cast<int>(coords.size()); ++i)
    if (periods_[i]) coords[i] = wrap(coords[i], *periods_[i]);
  if (time_ == TimeFactor::Circle && static_cast<int>(coords.size()) > dim())
    coords[dim()] = wrap(coords[dim()], 1.0);
}

double Manifold::distance(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    double diff = a[i] - b[i];
    int idx = static_cast<int>(i);
    double period = 0.0;
    if (idx < dim() && periods_[idx])
      period = *periods_[idx];
    else if (idx == dim() && time_ == TimeFactor::Circle)
      period = 1.0;
    if (period > 0.0) {
      diff = std::fmod(diff, period);
      if (diff > period / 2) diff -= period;
      if (diff < -period / 2) diff += period;
    }
    s += diff * diff;
  }
  return std::sqrt(s);
}

bool Manifold::operator==(const Manifold& o) const {
  if (d_ != o.d_ || time_ != o.time_) return false;
  for (int i = 0; i < 2 * d_; ++i) {
    if (periods_[i].has_value() != o.periods_[i].has_value()) return false;
    if (periods_[i] && *periods_[i] != *o.periods_[i]) return false;
  }
  return true;
}

}  // namespace hamreach
