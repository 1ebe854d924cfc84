#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rs/rng.hpp"

namespace rs {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

struct GeometryParams {
  double side_length_m = 20.0;
  int num_aps = 8;
  int num_antennas = 4;
  int num_ues = 10;
  double ap_height_m = 6.0;
  double ue_height_m = 1.0;
  double carrier_hz = 2e9;
  // When non-empty these positions are used verbatim instead of sampling.
  std::vector<Eigen::Vector3d> fixed_ue_positions;
};

// Far-field limit of an N-antenna ULA: N^2 * lambda / 2.
double fraunhofer_distance(int num_antennas, double carrier_hz);

struct Deployment {
  double side_length_m = 0.0;
  double fraunhofer_m = 0.0;
  int antennas_per_ap = 1;
  std::vector<Eigen::Vector3d> ap_positions;
  std::vector<Eigen::Vector3d> ue_positions;
  // Unit vectors in the horizontal plane: array axis along the perimeter and
  // inward broadside direction, per AP.
  std::vector<Eigen::Vector2d> ap_tangents;
  std::vector<Eigen::Vector2d> ap_normals;

  int num_aps() const { return static_cast<int>(ap_positions.size()); }
  int num_ues() const { return static_cast<int>(ue_positions.size()); }

  double ue_ap_distance(int k, int l) const {
    return (ue_positions[k] - ap_positions[l]).norm();
  }
  double ue_ue_distance(int k, int i) const {
    return (ue_positions[k] - ue_positions[i]).norm();
  }
  double ap_ap_distance(int l, int j) const {
    return (ap_positions[l] - ap_positions[j]).norm();
  }
  // Azimuth of UE k seen from AP l, measured from the inward broadside
  // direction, so that 0 means straight off the stripe and +-pi/2 points
  // along the array axis.
  double azimuth_from_broadside(int k, int l) const;
};

// APs sit on the perimeter of a side_length x side_length square at uniform
// arc spacing, starting at the origin corner and walking counter-clockwise.
std::vector<Eigen::Vector3d> place_aps(const GeometryParams& params);

// Uniform rejection sampling inside the square; a draw is accepted when its
// 3-D distance to every AP is at least the Fraunhofer distance. Throws after
// 1e6 consecutive rejections for a single UE.
std::vector<Eigen::Vector3d> place_ues(const GeometryParams& params,
                                       const std::vector<Eigen::Vector3d>& aps,
                                       Rng& rng);

Deployment build_deployment(const GeometryParams& params, Rng& rng);

}  // namespace rs
