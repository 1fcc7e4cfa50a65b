#include "capsim/geometry.hpp"

namespace capsim {

double polyline_length(std::span<const SphPoint> points, bool closed) {
  if (points.size() < 2) throw DegenerateCurve("polyline_length: fewer than 2 points");
  std::vector<UnitVec3> xs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) xs[i] = chart_forward(points[i]);
  KahanSum acc;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    acc.add(geodesic_distance(xs[i], xs[i + 1]));
  if (closed) acc.add(geodesic_distance(xs.back(), xs.front()));
  return acc.value();
}

}  // namespace capsim
