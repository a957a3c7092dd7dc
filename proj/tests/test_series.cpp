#include "deltavpr/error.hpp"
#include "deltavpr/matching.hpp"
#include "deltavpr/series.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace deltavpr;

namespace {

DescriptorSeries series_of(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return DescriptorSeries(m);
}

} // namespace

TEST_SUITE("series") {

TEST_CASE("construction rejects invalid shapes and values") {
    CHECK_THROWS_AS(DescriptorSeries(Matrix(0, 3)), DataError);
    CHECK_THROWS_AS(DescriptorSeries(Matrix(3, 0)), DataError);

    Matrix m = Matrix::Ones(3, 2);
    m(1, 1) = std::nan("");
    try {
        DescriptorSeries s(m);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 1, column 1") != std::string::npos);
    }

    CHECK_THROWS_AS(DescriptorSeries(Matrix::Ones(3, 2), PositionMatrix::Zero(2, 2)), DataError);
    CHECK_THROWS_AS(DescriptorSeries(Matrix::Ones(3, 2), std::nullopt, FrameRange{2, 4}), DataError);
    CHECK_THROWS_AS(DescriptorSeries(Matrix::Ones(3, 2), std::nullopt, FrameRange{2, 1}), DataError);
    CHECK_NOTHROW(DescriptorSeries(Matrix::Ones(3, 2), std::nullopt, FrameRange{0, 3}));
}

TEST_CASE("l2_normalize examples") {
    const auto out = l2_normalize(series_of({{3, 4}, {0, 0}, {1, 1}}));
    CHECK(out.data()(0, 0) == doctest::Approx(0.6));
    CHECK(out.data()(0, 1) == doctest::Approx(0.8));
    CHECK(out.data()(1, 0) == 0.0);
    CHECK(out.data()(1, 1) == 0.0);
    CHECK(out.data()(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(out.data()(2, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("l2_normalize is idempotent") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto once = l2_normalize(oracle::random_series(30, 7, seed));
        const auto twice = l2_normalize(once);
        CHECK((once.data() - twice.data()).cwiseAbs().maxCoeff() <= 1e-12);
        for (Eigen::Index t = 0; t < once.data().rows(); ++t) {
            CHECK(once.data().row(t).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("cosine distance is half the squared distance of normalized rows") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = oracle::random_series(12, 9, seed);
        const auto n = l2_normalize(s);
        for (Eigen::Index i = 0; i + 1 < s.data().rows(); ++i) {
            const Vector a = s.data().row(i).transpose();
            const Vector b = s.data().row(i + 1).transpose();
            const double cos = cosine_distance({a.data(), 9}, {b.data(), 9});
            const double half_sq = 0.5 * (n.data().row(i) - n.data().row(i + 1)).squaredNorm();
            CHECK(std::abs(cos - half_sq) <= 1e-9);
        }
    }
}

TEST_CASE("ground truth validation") {
    GroundTruth gt = identity_ground_truth(4);
    CHECK_NOTHROW(gt.validate(4, 4));
    CHECK_THROWS_AS(gt.validate(5, 4), DataError);
    CHECK_THROWS_AS(gt.validate(4, 3), DataError);
    gt.radius = -1;
    CHECK_THROWS_AS(gt.validate(4, 4), ConfigError);
    CHECK(parse_radius_mode("meters") == RadiusMode::Meters);
    CHECK_THROWS_AS(parse_radius_mode("miles"), ConfigError);
}

TEST_CASE("apply_permutation with the identity leaves inputs unchanged") {
    const auto ref = oracle::random_series(5, 3, 1);
    const auto query = oracle::random_series(5, 3, 2);
    const auto gt = identity_ground_truth(5);
    const std::vector<std::size_t> identity{0, 1, 2, 3, 4};
    const auto out = apply_permutation(ref, query, gt, identity);
    CHECK(out.ref.data() == ref.data());
    CHECK(out.query.data() == query.data());
    CHECK(out.gt.ref_index == gt.ref_index);
}

TEST_CASE("apply_permutation remaps ground truth by hand trace") {
    // New frame i holds old frame perm[i]; old frame 0 moves to position 1.
    const std::vector<std::size_t> perm{2, 0, 1};
    const auto ref = series_of({{10}, {11}, {12}});
    const auto query = series_of({{20}, {21}, {22}});
    GroundTruth gt = identity_ground_truth(3);
    const auto out = apply_permutation(ref, query, gt, perm);
    CHECK(out.query.data()(1, 0) == 20.0);
    CHECK(out.ref.data()(1, 0) == 10.0);
    CHECK(out.gt.ref_index[1] == 1);

    // A non-identity correspondence: query 0 -> ref 2 becomes query 1 -> ref 0.
    gt.ref_index = {2, 0, 1};
    const auto out2 = apply_permutation(ref, query, gt, perm);
    CHECK(out2.gt.ref_index[1] == 0);
    for (std::size_t i = 0; i < 3; ++i) {
        // The pairing of actual rows survives the shuffle.
        const double q_old = out2.query.data()(static_cast<Eigen::Index>(i), 0) - 20;
        const double r_old = out2.ref.data()(static_cast<Eigen::Index>(out2.gt.ref_index[i]), 0) - 10;
        CHECK(gt.ref_index[static_cast<std::size_t>(q_old)] == static_cast<std::size_t>(r_old));
    }
}

TEST_CASE("apply_permutation is deterministic, preserves rows and inverts") {
    const auto ref = oracle::random_series(50, 4, 3);
    const auto query = oracle::random_series(50, 4, 4);
    const auto gt = identity_ground_truth(50, RadiusMode::Frames, 1.0);
    const auto a = apply_permutation(ref, query, gt, 99);
    const auto b = apply_permutation(ref, query, gt, 99);
    CHECK(a.ref.data() == b.ref.data());
    CHECK(a.query.data() == b.query.data());
    CHECK(a.gt.ref_index == b.gt.ref_index);
    CHECK(a.gt.radius == 1.0);

    const auto perm = random_permutation(50, 99);
    CHECK_FALSE(std::is_sorted(perm.begin(), perm.end()));
    const auto inverse = invert_permutation(perm);
    const auto back = apply_permutation(a.ref, a.query, a.gt, inverse);
    CHECK(back.ref.data() == ref.data());
    CHECK(back.query.data() == query.data());
    CHECK(back.gt.ref_index == gt.ref_index);

    // Shuffled identity correspondence stays the identity.
    for (std::size_t i = 0; i < 50; ++i) CHECK(a.gt.ref_index[i] == i);
}

TEST_CASE("apply_permutation rejects mismatched lengths") {
    const auto ref = oracle::random_series(5, 2, 1);
    const auto query = oracle::random_series(6, 2, 2);
    CHECK_THROWS_AS(apply_permutation(ref, query, identity_ground_truth(6), 1), DataError);
    CHECK_THROWS_AS(invert_permutation(std::vector<std::size_t>{0, 0}), ConfigError);
}

} // TEST_SUITE
