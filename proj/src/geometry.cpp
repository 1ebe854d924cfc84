#include "rs/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rs {

double fraunhofer_distance(int num_antennas, double carrier_hz) {
  if (num_antennas < 1 || carrier_hz <= 0.0) {
    throw std::invalid_argument("fraunhofer_distance: bad antenna count or carrier");
  }
  const double lambda = kSpeedOfLight / carrier_hz;
  return static_cast<double>(num_antennas) * num_antennas * lambda / 2.0;
}

namespace {

struct PerimeterPoint {
  Eigen::Vector2d pos;
  Eigen::Vector2d tangent;
  Eigen::Vector2d normal;  // inward
};

// Maps arc length s in [0, 4D) to a point on the square perimeter. Side 0 runs
// along y=0 in +x, then the walk continues counter-clockwise; a point landing
// exactly on a corner belongs to the side it starts.
PerimeterPoint perimeter_point(double s, double d) {
  const int side = static_cast<int>(std::floor(s / d)) % 4;
  const double r = s - static_cast<double>(side) * d;
  switch (side) {
    case 0:
      return {{r, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    case 1:
      return {{d, r}, {0.0, 1.0}, {-1.0, 0.0}};
    case 2:
      return {{d - r, d}, {-1.0, 0.0}, {0.0, -1.0}};
    default:
      return {{0.0, d - r}, {0.0, -1.0}, {1.0, 0.0}};
  }
}

}  // namespace

std::vector<Eigen::Vector3d> place_aps(const GeometryParams& params) {
  if (params.num_aps < 1 || params.side_length_m <= 0.0) {
    throw std::invalid_argument("place_aps: bad AP count or side length");
  }
  const double spacing = 4.0 * params.side_length_m / params.num_aps;
  std::vector<Eigen::Vector3d> aps;
  aps.reserve(params.num_aps);
  for (int l = 0; l < params.num_aps; ++l) {
    const PerimeterPoint p = perimeter_point(l * spacing, params.side_length_m);
    aps.emplace_back(p.pos.x(), p.pos.y(), params.ap_height_m);
  }
  return aps;
}

std::vector<Eigen::Vector3d> place_ues(const GeometryParams& params,
                                       const std::vector<Eigen::Vector3d>& aps,
                                       Rng& rng) {
  const double d_min = fraunhofer_distance(params.num_antennas, params.carrier_hz);
  std::uniform_real_distribution<double> coord(0.0, params.side_length_m);
  std::vector<Eigen::Vector3d> ues;
  ues.reserve(params.num_ues);
  constexpr long kMaxRejections = 1000000;
  for (int k = 0; k < params.num_ues; ++k) {
    long rejections = 0;
    for (;;) {
      const double x = coord(rng);
      const double y = coord(rng);
      const Eigen::Vector3d candidate(x, y, params.ue_height_m);
      bool ok = true;
      for (const auto& ap : aps) {
        if ((candidate - ap).norm() < d_min) {
          ok = false;
          break;
        }
      }
      if (ok) {
        ues.push_back(candidate);
        break;
      }
      if (++rejections >= kMaxRejections) {
        throw std::runtime_error(
            "place_ues: far-field constraint makes placement infeasible");
      }
    }
  }
  return ues;
}

double Deployment::azimuth_from_broadside(int k, int l) const {
  const Eigen::Vector2d v = (ue_positions[k] - ap_positions[l]).head<2>();
  return std::atan2(v.dot(ap_tangents[l]), v.dot(ap_normals[l]));
}

Deployment build_deployment(const GeometryParams& params, Rng& rng) {
  Deployment dep;
  dep.side_length_m = params.side_length_m;
  dep.antennas_per_ap = params.num_antennas;
  dep.fraunhofer_m = fraunhofer_distance(params.num_antennas, params.carrier_hz);
  dep.ap_positions = place_aps(params);
  const double spacing = 4.0 * params.side_length_m / params.num_aps;
  dep.ap_tangents.reserve(params.num_aps);
  dep.ap_normals.reserve(params.num_aps);
  for (int l = 0; l < params.num_aps; ++l) {
    const PerimeterPoint p = perimeter_point(l * spacing, params.side_length_m);
    dep.ap_tangents.push_back(p.tangent);
    dep.ap_normals.push_back(p.normal);
  }
  if (!params.fixed_ue_positions.empty()) {
    if (static_cast<int>(params.fixed_ue_positions.size()) != params.num_ues) {
      throw std::invalid_argument("build_deployment: fixed UE list does not match num_ues");
    }
    for (const auto& ue : params.fixed_ue_positions) {
      for (const auto& ap : dep.ap_positions) {
        if ((ue - ap).norm() < dep.fraunhofer_m) {
          throw std::invalid_argument(
              "build_deployment: fixed UE position violates the far-field limit");
        }
      }
    }
    dep.ue_positions = params.fixed_ue_positions;
  } else {
    dep.ue_positions = place_ues(params, dep.ap_positions, rng);
  }
  return dep;
}

}  // namespace rs
