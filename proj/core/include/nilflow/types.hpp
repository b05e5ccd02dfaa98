#pragma once

#include <Eigen/Dense>

#include <vector>

namespace nilflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using ScalarField = std::vector<double>;
using VectorField = std::vector<Vec3>;
using SymMatrixField = std::vector<Mat3>;
using AntisymMatrixField = std::vector<Mat3>;

}  // namespace nilflow
