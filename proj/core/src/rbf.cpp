#include "effortnn/rbf.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "effortnn/error.hpp"
#include "effortnn/numeric.hpp"

namespace effortnn {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
    return d;
}

double spread_from(std::vector<double> neighbor_distances, int k, double fallback) {
    if (neighbor_distances.empty()) return fallback;
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), neighbor_distances.size());
    std::partial_sort(neighbor_distances.begin(), neighbor_distances.begin() + static_cast<std::ptrdiff_t>(keep),
                      neighbor_distances.end());
    neighbor_distances.resize(keep);
    const double s = median(std::move(neighbor_distances));
    return s > 0.0 ? s : fallback;
}

}  // namespace

Eigen::MatrixXd rbf_activations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                const Eigen::VectorXd& spreads) {
    if (x.cols() != centers.cols()) throw DomainError("rbf_activations: feature dimension mismatch");
    Eigen::MatrixXd phi(x.rows(), centers.rows());
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
        const double denom = 2.0 * spreads[j] * spreads[j];
        phi.col(j) = ((x.rowwise() - centers.row(j)).rowwise().squaredNorm() / -denom).array().exp();
    }
    return phi;
}

Eigen::VectorXd RbfNetwork::forward(const Eigen::MatrixXd& x) const {
    if (hidden_count() == 0) return Eigen::VectorXd::Constant(x.rows(), output_bias);
    return (rbf_activations(x, centers, spreads) * output_weights).array() + output_bias;
}

double median_pairwise_distance(const Eigen::MatrixXd& x) {
    std::vector<double> all;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) all.push_back((x.row(i) - x.row(j)).norm());
    const double m = median(std::move(all));
    return m > 0.0 ? m : 1.0;
}

Eigen::VectorXd rbf_spreads(const Eigen::MatrixXd& centers, int k, double fallback) {
    const Eigen::Index m = centers.rows();
    Eigen::VectorXd spreads(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<double> dist;
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != i) dist.push_back((centers.row(i) - centers.row(j)).norm());
        spreads[i] = spread_from(std::move(dist), k, fallback);
    }
    return spreads;
}

RbfNetwork fit_rbf_output(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::MatrixXd centers,
                          Eigen::VectorXd spreads, double ridge) {
    RbfNetwork net;
    net.centers = std::move(centers);
    net.spreads = std::move(spreads);
    const Eigen::Index m = net.centers.rows();
    Eigen::MatrixXd design(x.rows(), m + 1);
    if (m > 0) design.leftCols(m) = rbf_activations(x, net.centers, net.spreads);
    design.col(m).setOnes();
    const auto solved = ridge_least_squares(design, y, ridge, 1);
    net.output_weights = solved.coefficients.head(m);
    net.output_bias = solved.coefficients[m];
    return net;
}

RbfForwardSelector::RbfForwardSelector(Eigen::MatrixXd x, Eigen::VectorXd y, double ridge, int k_neighbors)
    : x_(std::move(x)), y_(std::move(y)), ridge_(ridge), k_neighbors_(k_neighbors) {
    if (x_.rows() == 0) throw DomainError("RbfForwardSelector: empty training set");
    distances_ = pairwise_distances(x_);
    fallback_spread_ = median_pairwise_distance(x_);
    used_.assign(static_cast<std::size_t>(x_.rows()), false);
    refit();
}

void RbfForwardSelector::refit() {
    const Eigen::Index m = center_count();
    Eigen::MatrixXd centers(m, x_.cols());
    for (Eigen::Index j = 0; j < m; ++j) centers.row(j) = x_.row(selected_[static_cast<std::size_t>(j)]);
    Eigen::VectorXd spreads = rbf_spreads(centers, k_neighbors_, fallback_spread_);
    network_ = fit_rbf_output(x_, y_, std::move(centers), std::move(spreads), ridge_);

    residual_ = y_ - network_.forward(x_);
    training_mse_ = residual_.squaredNorm() / static_cast<double>(x_.rows());

    Eigen::MatrixXd columns(x_.rows(), m + 1);
    columns.col(0).setOnes();
    if (m > 0) columns.rightCols(m) = rbf_activations(x_, network_.centers, network_.spreads);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(columns);
    basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(x_.rows(), std::min(x_.rows(), m + 1));
}

bool RbfForwardSelector::add_center() {
    const Eigen::Index n = x_.rows();
    double best_score = 0.0;
    Eigen::Index best = -1;
    for (Eigen::Index c = 0; c < n; ++c) {
        if (used_[static_cast<std::size_t>(c)]) continue;
        std::vector<double> dist;
        dist.reserve(selected_.size());
        bool duplicate = false;
        for (auto s : selected_) {
            dist.push_back(distances_(c, s));
            if (distances_(c, s) == 0.0) duplicate = true;
        }
        if (duplicate) continue;
        const double spread = spread_from(std::move(dist), k_neighbors_, fallback_spread_);
        const Eigen::VectorXd phi =
            ((x_.rowwise() - x_.row(c)).rowwise().squaredNorm() / (-2.0 * spread * spread)).array().exp();
        const Eigen::VectorXd orth = phi - basis_ * (basis_.transpose() * phi);
        const double norm2 = orth.squaredNorm();
        if (norm2 <= 1e-12 * phi.squaredNorm()) continue;
        const double proj = orth.dot(residual_);
        const double score = proj * proj / norm2;
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    if (best < 0) return false;
    used_[static_cast<std::size_t>(best)] = true;
    selected_.push_back(best);
    refit();
    return true;
}

}  // namespace effortnn
