// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

namespace geomflow {

/// Centers a world-frame sequence at the valid-point centroid and divides by
/// the mean centroid distance (clamped below by kScaleEpsilon). Points and pose
/// translations are shifted and scaled; flows are scaled only. Statistics pool
/// all frames jointly.
std::pair<SequenceSample, NormParams> canonical_normalize(const SequenceSample& seq);

/// Exact inverse of canonical_normalize up to floating point.
SequenceSample canonical_denormalize(const SequenceSample& seq, const NormParams& params);

/// Bounding-box baseline: centers at the bbox midpoint and scales by half the
/// largest extent so coordinates land in [-1, 1].
std::pair<SequenceSample, NormParams> max_normalize(const SequenceSample& seq);

}  // namespace geomflow
