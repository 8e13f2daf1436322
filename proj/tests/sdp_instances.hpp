#pragma once

// Closed-form SDP instances shared by the unit suite and the acceptance run.

#include <Eigen/Dense>

#include "aqnbf/sdp.hpp"

namespace sdp_instances {

using namespace aqnbf::sdp;

// min x s.t. [[x,1],[1,x]] psd, written as the dual of a 2x2 standard form.
inline SdpProblem boundary_problem() {
  SdpProblem p;
  p.blocks = {{2}};
  p.objective = {{0, 0, 1, 1.0}};
  p.constraints = {{{{0, 0, 0, -1.0}, {0, 1, 1, -1.0}}, -1.0}};
  return p;
}

inline SdpProblem trace_problem() {
  SdpProblem p;
  p.blocks = {{3}};
  p.objective = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {0, 2, 2, 1.0}};
  p.constraints = {{{{0, 0, 0, 1.0}}, 3.0}};
  return p;
}

inline Eigen::Matrix3d lambda_max_matrix() {
  Eigen::Matrix3d m;
  m << 2.0, -1.0, 0.5,  //
      -1.0, 3.0, 0.25,  //
      0.5, 0.25, -1.0;
  return m;
}

// max <M, X> s.t. tr X = 1, posed as min <-M, X> s.t. <-I, X> = -1 so that
// the dual variable y is t in t I - M psd.
inline SdpProblem lambda_max_problem() {
  const Eigen::Matrix3d m = lambda_max_matrix();
  SdpProblem p;
  p.blocks = {{3}};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) p.objective.push_back({0, i, j, -m(i, j)});
  p.constraints = {{{{0, 0, 0, -1.0}, {0, 1, 1, -1.0}, {0, 2, 2, -1.0}}, -1.0}};
  return p;
}

inline SdpProblem infeasible_primal() {
  SdpProblem p;
  p.blocks = {{2}};
  p.objective = {{0, 0, 0, 1.0}};
  p.constraints = {{{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, -1.0}};
  return p;
}

inline SdpProblem infeasible_dual() {
  SdpProblem p;
  p.blocks = {{2}};
  p.objective = {{0, 1, 1, -1.0}};
  p.constraints = {{{{0, 0, 0, 1.0}}, 1.0}};
  return p;
}

}  // namespace sdp_instances
