#include "deltavpr/reduction.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace deltavpr {

PcaModel pca_fit(const DescriptorSeries& series, std::size_t k, const PcaOptions& options) {
    const std::size_t frames = series.frame_count();
    const std::size_t dims = series.dim();
    if (frames < 2) {
        throw DataError("PCA needs at least 2 frames");
    }
    if (k < 1 || k > std::min(frames, dims)) {
        throw ConfigError(fmt::format("PCA k must be in [1, {}], got {}", std::min(frames, dims), k));
    }

    PcaModel model;
    model.whiten = options.whiten;
    model.mean = options.center ? Vector(series.data().colwise().mean().transpose())
                                : Vector(Vector::Zero(static_cast<Eigen::Index>(dims)));

    const Eigen::MatrixXd centred = series.data().rowwise() - model.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const auto kk = static_cast<Eigen::Index>(k);

    model.components = svd.matrixV().leftCols(kk);
    model.explained_variance =
        svd.singularValues().head(kk).array().square() / static_cast<double>(frames - 1);

    for (Eigen::Index c = 0; c < kk; ++c) {
        Eigen::Index arg = 0;
        model.components.col(c).cwiseAbs().maxCoeff(&arg);
        if (model.components(arg, c) < 0.0) {
            model.components.col(c) *= -1.0;
        }
    }
    return model;
}

namespace {

void check_dim(const PcaModel& model, Eigen::Index cols) {
    if (static_cast<std::size_t>(cols) != model.input_dim()) {
        throw DataError(fmt::format("PCA model expects dim {}, series has dim {}", model.input_dim(), cols));
    }
}

Vector whitening_scale(const PcaModel& model) {
    Vector scale = Vector::Ones(model.explained_variance.size());
    if (model.whiten) {
        for (Eigen::Index i = 0; i < scale.size(); ++i) {
            const double sd = std::sqrt(model.explained_variance(i));
            if (sd > 0.0) scale(i) = 1.0 / sd;
        }
    }
    return scale;
}

} // namespace

DescriptorSeries pca_transform(const PcaModel& model, const DescriptorSeries& series) {
    check_dim(model, series.data().cols());
    Matrix z = (series.data().rowwise() - model.mean.transpose()) * model.components;
    if (model.whiten) {
        z = z * whitening_scale(model).asDiagonal();
    }
    return DescriptorSeries(std::move(z), series.positions(), series.valid_range());
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& coordinates) {
    if (static_cast<std::size_t>(coordinates.cols()) != model.k()) {
        throw DataError(fmt::format("PCA model has {} components, coordinates have {}", model.k(),
                                    coordinates.cols()));
    }
    Matrix z = coordinates;
    if (model.whiten) {
        z = z * whitening_scale(model).cwiseInverse().asDiagonal();
    }
    Matrix x = z * model.components.transpose();
    x.rowwise() += model.mean.transpose();
    return x;
}

} // namespace deltavpr
