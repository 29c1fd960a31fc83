#include "crq/least_squares.hpp"

#include "crq/error.hpp"

namespace crq {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                              const Eigen::VectorXd& weights) {
    if (response.size() != design.rows()) throw Error("least_squares: response length differs from design rows");
    if (weights.size() != 0 && weights.size() != design.rows())
        throw Error("least_squares: weight length differs from design rows");

    Eigen::MatrixXd a = design;
    Eigen::VectorXd b = response;
    if (weights.size() != 0) {
        if (weights.minCoeff() < 0.0) throw Error("least_squares: negative weight");
        const Eigen::VectorXd root = weights.cwiseSqrt();
        a = root.asDiagonal() * design;
        b = root.cwiseProduct(response);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < design.cols()) throw Error("least_squares: design is rank deficient");
    return qr.solve(b);
}

}  // namespace crq
