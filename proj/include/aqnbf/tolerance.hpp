#pragma once

namespace aqnbf {

/// Acceptance thresholds for behavior tables.
struct ToleranceConfig {
  double normalization = 1e-9;
  double negativity = 1e-12;
  double signalling = 1e-9;
};

/// Thresholds used for behaviors read off an optimal moment matrix, where the
/// interior-point solve leaves entries a few ulps-of-the-gap below zero.
inline ToleranceConfig extraction_tolerances() {
  ToleranceConfig t;
  t.negativity = 1e-7;
  t.normalization = 1e-8;
  t.signalling = 1e-8;
  return t;
}

}  // namespace aqnbf
