#include "deltavpr/error.hpp"
#include "deltavpr/reduction.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace deltavpr;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix column_variance(const Matrix& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Matrix centred = x.rowwise() - mean;
    return (centred.cwiseProduct(centred).colwise().sum() / static_cast<double>(x.rows() - 1));
}

} // namespace

TEST_SUITE("reduction") {

TEST_CASE("points on a line") {
    Matrix x(5, 2);
    for (int t = 0; t < 5; ++t) x.row(t) << t, t;
    const auto model = pca_fit(DescriptorSeries(x), 2);
    CHECK(model.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(model.components(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    // (t, t) has squared distance 2 (t - 2)^2 from the mean, summing to 20 over 4 dof.
    CHECK(model.explained_variance(0) == doctest::Approx(5.0));
    CHECK(std::abs(model.explained_variance(1)) <= 1e-12);
    CHECK(model.mean(0) == doctest::Approx(2.0));
}

TEST_CASE("full-rank model preserves total variance, distances and round trips") {
    const Matrix x = oracle::random_matrix(40, 6, 3);
    const DescriptorSeries series(x);
    const auto model = pca_fit(series, 6);

    CHECK(model.explained_variance.sum() == doctest::Approx(column_variance(x).sum()));
    for (Eigen::Index i = 1; i < 6; ++i) CHECK(model.explained_variance(i) <= model.explained_variance(i - 1));
    CHECK(max_abs(model.components.transpose() * model.components - Matrix::Identity(6, 6)) <= 1e-10);

    const Matrix z = pca_transform(model, series).data();
    for (Eigen::Index i = 0; i < 40; i += 7) {
        for (Eigen::Index j = 0; j < 40; j += 5) {
            CHECK((z.row(i) - z.row(j)).norm() == doctest::Approx((x.row(i) - x.row(j)).norm()));
        }
    }
    CHECK(max_abs(pca_reconstruct(model, z) - x) <= 1e-10);

    // Projected coordinates are uncorrelated with the fitted variances.
    const Matrix cov = (z.transpose() * z) / 39.0;
    CHECK(max_abs(cov - Matrix(model.explained_variance.asDiagonal())) <= 1e-10);
}

TEST_CASE("truncated model") {
    const Matrix x = oracle::random_matrix(30, 8, 4);
    const DescriptorSeries series(x);
    const auto model = pca_fit(series, 3);
    CHECK(model.k() == 3);
    CHECK(model.input_dim() == 8);
    CHECK(max_abs(model.components.transpose() * model.components - Matrix::Identity(3, 3)) <= 1e-10);

    const Matrix mean_row = model.mean.transpose();
    CHECK(max_abs(pca_transform(model, DescriptorSeries(mean_row)).data()) <= 1e-12);

    const Matrix once = pca_reconstruct(model, pca_transform(model, series).data());
    const Matrix twice = pca_reconstruct(model, pca_transform(model, DescriptorSeries(once)).data());
    CHECK(max_abs(once - twice) <= 1e-10);

    for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::Index arg = 0;
        model.components.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(model.components(arg, c) > 0.0);
    }
}

TEST_CASE("row order does not change the model") {
    const Matrix x = oracle::random_matrix(25, 5, 6);
    const auto perm = random_permutation(25, 1);
    Matrix shuffled(25, 5);
    for (Eigen::Index i = 0; i < 25; ++i) shuffled.row(i) = x.row(static_cast<Eigen::Index>(perm[i]));
    const auto a = pca_fit(DescriptorSeries(x), 4);
    const auto b = pca_fit(DescriptorSeries(shuffled), 4);
    CHECK(max_abs(a.components - b.components) <= 1e-9);
    CHECK(max_abs(a.explained_variance - b.explained_variance) <= 1e-9);
}

TEST_CASE("whitening and centering options") {
    const Matrix x = (oracle::random_matrix(50, 4, 8).array() + 3.0).matrix();
    const auto white = pca_fit(DescriptorSeries(x), 4, PcaOptions{true, true});
    const Matrix z = pca_transform(white, DescriptorSeries(x)).data();
    CHECK(max_abs(column_variance(z).array() - 1.0) <= 1e-9);
    CHECK(max_abs(pca_reconstruct(white, z) - x) <= 1e-9);

    const auto raw = pca_fit(DescriptorSeries(x), 2, PcaOptions{false, false});
    CHECK(raw.mean.isZero());
}

TEST_CASE("positions and valid range are carried through") {
    const Matrix x = oracle::random_matrix(6, 3, 1);
    PositionMatrix pos(6, 2);
    pos.setRandom();
    const DescriptorSeries series(x, pos, FrameRange{1, 4});
    const auto out = pca_transform(pca_fit(series, 2), series);
    CHECK(out.positions().has_value());
    CHECK(*out.valid_range() == FrameRange{1, 4});
}

TEST_CASE("pca errors") {
    const auto series = oracle::random_series(10, 4, 0);
    CHECK_THROWS_AS(pca_fit(series, 0), ConfigError);
    CHECK_THROWS_AS(pca_fit(series, 5), ConfigError);
    CHECK_THROWS_AS(pca_fit(oracle::random_series(1, 4, 0), 1), DataError);
    const auto model = pca_fit(series, 2);
    CHECK_THROWS_AS(pca_transform(model, oracle::random_series(3, 5, 0)), DataError);
}

} // TEST_SUITE
