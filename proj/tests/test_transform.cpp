#include "deltavpr/error.hpp"
#include "deltavpr/transform.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace deltavpr;

namespace {

DescriptorSeries column(std::initializer_list<double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) m(i++, 0) = v;
    return DescriptorSeries(m);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DeltaConfig valid_cfg(std::size_t l) { return {l, Padding::ValidOnly, {}}; }
DeltaConfig edge_cfg(std::size_t l) { return {l, Padding::EdgeReplicate, {}}; }

} // namespace

TEST_SUITE("transform") {

TEST_CASE("smooth examples") {
    const DescriptorSeries constant(Matrix::Constant(9, 3, 2.5));
    for (std::size_t l : {1, 2, 3, 9}) {
        CHECK(max_abs(smooth(constant, l).data().array() - 2.5) <= 1e-12);
    }

    // l = 2 averages frames t-1..t+1.
    const auto s = smooth(column({0, 3, 6}), 2);
    CHECK(s.data()(1, 0) == doctest::Approx(3.0));
    CHECK(s.data()(0, 0) == doctest::Approx(1.5));
    CHECK(s.data()(2, 0) == doctest::Approx(4.5));

    // l = 1 averages frames t..t+1.
    const auto s1 = smooth(column({2, 4}), 1);
    CHECK(s1.data()(0, 0) == doctest::Approx(3.0));
    CHECK(s1.data()(1, 0) == doctest::Approx(4.0));
}

TEST_CASE("smooth valid range and errors") {
    const auto s = smooth(oracle::random_series(20, 2, 1), 5);
    REQUIRE(s.valid_range());
    CHECK(*s.valid_range() == FrameRange{2, 17});
    const auto e = smooth(oracle::random_series(20, 2, 1), 4);
    CHECK(*e.valid_range() == FrameRange{2, 18});
    CHECK_THROWS_WITH_AS(smooth(oracle::random_series(4, 2, 1), 5), doctest::Contains("window exceeds series"),
                         ConfigError);
    CHECK_THROWS_AS(smooth(oracle::random_series(4, 2, 1), 0), ConfigError);
}

TEST_CASE("smooth over the whole series gives the column mean") {
    // With l <= T the window covers every frame only for T <= 2.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = oracle::random_series(2, 5, seed);
        const auto s = smooth(x, 2);
        const Eigen::RowVectorXd mean = x.data().colwise().mean();
        for (Eigen::Index t = 0; t < 2; ++t) CHECK(max_abs(s.data().row(t) - mean) <= 1e-9);
    }
    const auto one = oracle::random_series(1, 4, 3);
    CHECK(max_abs(smooth(one, 1).data() - one.data()) <= 1e-12);
}

TEST_CASE("delta filter weights") {
    const auto w = delta_filter(3);
    REQUIRE(w.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(-1.0 / 3));
    for (std::size_t i = 3; i < 6; ++i) CHECK(w[i] == doctest::Approx(1.0 / 3));
}

TEST_CASE("delta examples") {
    const DescriptorSeries constant(Matrix::Constant(12, 4, -1.75));
    CHECK(max_abs(delta(constant, edge_cfg(3)).data()) <= 1e-12);
    CHECK(max_abs(delta(constant, valid_cfg(3)).data()) <= 1e-12);

    // Ramp of slope 1: interior delta equals slope * l.
    Matrix ramp(20, 1);
    for (Eigen::Index t = 0; t < 20; ++t) ramp(t, 0) = static_cast<double>(t);
    const auto d = delta(DescriptorSeries(ramp), edge_cfg(2));
    REQUIRE(d.valid_range());
    CHECK(*d.valid_range() == FrameRange{1, 18});
    for (std::size_t t = 1; t < 18; ++t) CHECK(d.data()(static_cast<Eigen::Index>(t), 0) == doctest::Approx(2.0));

    const auto v = delta(column({1, 2, 3, 4}), valid_cfg(1));
    REQUIRE(v.frame_count() == 3);
    for (Eigen::Index t = 0; t < 3; ++t) CHECK(v.data()(t, 0) == doctest::Approx(1.0));
}

TEST_CASE("delta valid-only errors and lengths") {
    CHECK_THROWS_WITH_AS(delta(oracle::random_series(7, 2, 0), valid_cfg(4)),
                         doctest::Contains("series too short for span"), ConfigError);
    CHECK(delta(oracle::random_series(8, 2, 0), valid_cfg(4)).frame_count() == 1);
    CHECK(delta(oracle::random_series(7, 2, 0), edge_cfg(4)).frame_count() == 7);
    CHECK_THROWS_AS(delta(oracle::random_series(7, 2, 0), edge_cfg(0)), ConfigError);
}

TEST_CASE("delta matches the mean-difference oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = oracle::random_series(60, 6, seed);
        for (std::size_t l : {1, 2, 5, 8}) {
            CHECK(max_abs(delta(x, valid_cfg(l)).data() - oracle::delta_by_means(x.data(), l)) <= 1e-9);
            CHECK(max_abs(delta(x, edge_cfg(l)).data() - oracle::delta_by_means_clamped(x.data(), l)) <= 1e-9);
        }
    }
}

TEST_CASE("edge-replicate agrees with valid-only inside the valid range") {
    const auto x = oracle::random_series(40, 3, 5);
    const auto e = delta(x, edge_cfg(6));
    const auto v = delta(x, valid_cfg(6));
    const auto r = *e.valid_range();
    REQUIRE(r.size() == v.frame_count());
    CHECK(max_abs(e.data().middleRows(static_cast<Eigen::Index>(r.start), static_cast<Eigen::Index>(r.size())) -
                  v.data()) <= 1e-12);
}

TEST_CASE("delta is offset invariant and linear") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = oracle::random_matrix(50, 8, seed);
        const Matrix y = oracle::random_matrix(50, 8, seed + 100);
        const Eigen::RowVectorXd c = oracle::random_matrix(1, 8, seed + 200, 10.0).row(0);
        const Matrix shifted = x.rowwise() + c;
        for (std::size_t l : {1, 4, 16}) {
            const auto cfg = edge_cfg(l);
            const Matrix dx = delta(DescriptorSeries(x), cfg).data();
            CHECK(max_abs(delta(DescriptorSeries(shifted), cfg).data() - dx) <= 1e-9);

            const double a = 1.7;
            const double b = -0.4;
            const Matrix combo = delta(DescriptorSeries(a * x + b * y), cfg).data();
            CHECK(max_abs(combo - (a * dx + b * delta(DescriptorSeries(y), cfg).data())) <= 1e-9);
        }
    }
}

TEST_CASE("time reversal negates the reversed delta") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = oracle::random_matrix(40, 5, seed);
        const Matrix reversed = x.colwise().reverse();
        for (std::size_t l : {1, 3, 7}) {
            const Matrix d = delta(DescriptorSeries(x), valid_cfg(l)).data();
            const Matrix dr = delta(DescriptorSeries(reversed), valid_cfg(l)).data();
            CHECK(max_abs(dr + Matrix(d.colwise().reverse())) <= 1e-9);
        }
    }
}

TEST_CASE("delta carries positions") {
    PositionMatrix p(10, 2);
    for (Eigen::Index t = 0; t < 10; ++t) p.row(t) << static_cast<double>(t), 0.0;
    const DescriptorSeries x(oracle::random_matrix(10, 2, 1), p);
    const auto v = delta(x, valid_cfg(3));
    REQUIRE(v.positions());
    CHECK((*v.positions())(0, 0) == 2.0);
    CHECK(delta(x, edge_cfg(3)).positions()->rows() == 10);
}

TEST_CASE("delta_bank") {
    const auto x = oracle::random_series(80, 4, 9);
    DeltaConfig cfg{16, Padding::EdgeReplicate, {16}};
    const auto single = delta_bank(x, cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0].span == 16);
    CHECK(single[0].series.data() == delta(x, edge_cfg(16)).data());

    cfg.spans = {30, 40, 50, 60};
    const auto bank = delta_bank(oracle::random_series(200, 4, 1), cfg);
    REQUIRE(bank.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(bank[i].span == cfg.spans[i]);
        CHECK(bank[i].series.frame_count() == 200);
    }

    // Valid-only padding is ignored so that spans stay frame aligned.
    cfg = DeltaConfig{1, Padding::ValidOnly, {2, 4}};
    const DescriptorSeries constant(Matrix::Constant(10, 3, 4.0));
    for (const auto& entry : delta_bank(constant, cfg)) {
        CHECK(entry.series.frame_count() == 10);
        CHECK(max_abs(entry.series.data()) <= 1e-12);
    }

    CHECK_THROWS_AS(delta_bank(x, DeltaConfig{4, Padding::EdgeReplicate, {}}), ConfigError);
    CHECK_THROWS_AS(delta_bank(x, DeltaConfig{4, Padding::EdgeReplicate, {4, 4}}), ConfigError);
    CHECK_THROWS_AS(delta_bank(x, DeltaConfig{4, Padding::EdgeReplicate, {8, 4}}), ConfigError);
}

} // TEST_SUITE
