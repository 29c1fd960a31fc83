#include "crq/cca.hpp"

#include "crq/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace crq {
namespace {

// Thin QR of a centered, weight-scaled block after constant columns are dropped:
// scaled * P = Q R, so the whitened scores are Q and weights map back via P R^{-1}.
struct Whitened {
    std::vector<Eigen::Index> kept;
    Eigen::MatrixXd q;
    Eigen::MatrixXd r;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd>::PermutationType perm;
};

Whitened whiten(const Eigen::MatrixXd& m, const Eigen::VectorXd& w, const char* name) {
    const double total = w.sum();
    const Eigen::RowVectorXd mean = (w.transpose() * m) / total;

    Whitened out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const Eigen::VectorXd c = m.col(j).array() - mean(j);
        const double var = w.dot(c.cwiseAbs2()) / total;
        if (var > 1e-20 * (1.0 + mean(j) * mean(j))) out.kept.push_back(j);
    }
    if (out.kept.empty()) throw Error(std::string("cca_leading: every ") + name + " column is constant");

    const auto k = static_cast<Eigen::Index>(out.kept.size());
    const Eigen::VectorXd root = (w / total).cwiseSqrt();
    Eigen::MatrixXd scaled(m.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index j = out.kept[static_cast<std::size_t>(c)];
        scaled.col(c) = root.cwiseProduct((m.col(j).array() - mean(j)).matrix());
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        std::string cols;
        for (Eigen::Index c = qr.rank(); c < k; ++c) {
            if (!cols.empty()) cols += ", ";
            cols += std::to_string(out.kept[static_cast<std::size_t>(qr.colsPermutation().indices()(c))]);
        }
        throw Error(std::string("cca_leading: singular covariance in ") + name + "; dependent columns {" + cols + "}");
    }
    out.q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
    out.r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    out.perm = qr.colsPermutation();
    return out;
}

Eigen::VectorXd unwhiten(const Whitened& wb, const Eigen::VectorXd& u, Eigen::Index full) {
    const Eigen::VectorXd z = wb.r.triangularView<Eigen::Upper>().solve(u);
    const Eigen::VectorXd permuted = wb.perm * z;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(full);
    for (std::size_t c = 0; c < wb.kept.size(); ++c) out(wb.kept[c]) = permuted(static_cast<Eigen::Index>(c));
    return out;
}

}  // namespace

CcaFit cca_leading(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& weights) {
    if (x.rows() != y.rows()) throw Error("cca_leading: X and Y differ in row count");
    if (x.rows() < 2) throw Error("cca_leading: need at least two rows");
    if (weights.size() != 0 && weights.size() != x.rows()) throw Error("cca_leading: weight length differs from rows");
    const Eigen::VectorXd w = weights.size() == 0 ? Eigen::VectorXd::Ones(x.rows()) : weights;
    if (w.minCoeff() < 0.0 || !(w.sum() > 0.0)) throw Error("cca_leading: weights must be nonnegative with positive sum");

    const Whitened wx = whiten(x, w, "X");
    const Whitened wy = whiten(y, w, "Y");

    const Eigen::MatrixXd cross = wx.q.transpose() * wy.q;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);

    CcaFit fit;
    fit.correlation = std::clamp(svd.singularValues()(0), 0.0, 1.0);
    fit.b = unwhiten(wx, svd.matrixU().col(0), x.cols());
    fit.a = unwhiten(wy, svd.matrixV().col(0), y.cols());
    // Fix the sign so the response weights lean positive.
    if (fit.a.sum() < 0.0) {
        fit.a = -fit.a;
        fit.b = -fit.b;
    }
    return fit;
}

}  // namespace crq
