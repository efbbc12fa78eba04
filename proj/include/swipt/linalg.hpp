#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace swipt {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// hᴴw
inline cplx inner(const CVec& a, const CVec& b) { return a.dot(b); }

inline double abs2(cplx z) { return std::norm(z); }

} // namespace swipt
