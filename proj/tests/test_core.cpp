// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/flow.hpp"
#include "geomflow/geometry.hpp"
#include "geomflow/normalize.hpp"
#include "geomflow/types.hpp"

#include <doctest.h>

#include "oracles.hpp"

using namespace geomflow;

TEST_CASE("validate_sequence accepts a well-formed sequence") {
    std::mt19937_64 rng(1);
    const SequenceSample seq = oracles::random_sequence(rng, 3);
    CHECK(validate_sequence(seq).empty());
}

TEST_CASE("validate_sequence flags N flows for N frames") {
    std::mt19937_64 rng(2);
    SequenceSample seq = oracles::random_sequence(rng, 3);
    seq.flows.push_back(seq.flows.back());
    const auto violations = validate_sequence(seq);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("flows") != std::string::npos);
}

TEST_CASE("validate_sequence flags a non-orthonormal rotation") {
    std::mt19937_64 rng(3);
    SequenceSample seq = oracles::random_sequence(rng, 3);
    seq.poses[1].rotation *= 2.0;
    const auto violations = validate_sequence(seq);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("orthonormal") != std::string::npos);
}

TEST_CASE("validate_sequence rejects single frames and reports masked nonzeros") {
    std::mt19937_64 rng(4);
    SequenceSample seq = oracles::random_sequence(rng, 2);
    SequenceSample single = seq;
    single.point_maps.resize(1);
    single.flows.clear();
    single.poses.resize(1);
    CHECK(!validate_sequence(single).empty());

    seq.point_maps[0].mask.at(0, 0) = 0;
    seq.point_maps[0].data.at(0, 0) = Eigen::Vector3d(1, 2, 3);
    const auto violations = validate_sequence(seq);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("masked-out") != std::string::npos);
}

// Fuzz: valid sequences never make the transform pipeline throw, and masked
// entries stay at the placeholder.
TEST_CASE("downstream operations are total on valid sequences") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        SequenceSample seq = oracles::random_sequence(rng, 3, 8, 8);
        REQUIRE(validate_sequence(seq).empty());

        auto [normalized, params] = canonical_normalize(seq);
        for (const PointMap& pm : normalized.point_maps)
            for (size_t i = 0; i < pm.data.size(); ++i)
                if (!pm.mask.cells[i]) CHECK(pm.data.cells[i] == Eigen::Vector3d::Zero());

        const PointMap deformed = deform(seq.point_maps[0], seq.flows[0]);
        for (size_t i = 0; i < deformed.data.size(); ++i)
            if (!deformed.mask.cells[i]) CHECK(deformed.data.cells[i] == Eigen::Vector3d::Zero());

        CHECK_NOTHROW(project_depth(seq.point_maps[0], seq.poses[0], seq.intrinsics));
        CHECK_NOTHROW(compute_normals(seq.point_maps[0]));
        CHECK_NOTHROW(pyramid_pad(seq.point_maps[0]));
        CHECK_NOTHROW(canonical_denormalize(normalized, params));
    }
}
