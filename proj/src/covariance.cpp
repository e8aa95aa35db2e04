#include "ampr/covariance.hpp"

#include <cmath>

#include "ampr/errors.hpp"

namespace ampr {

CovarianceModel CovarianceModel::identity(int p) {
    if (p <= 0) throw DimensionTooSmall("covariance dimension must be positive");
    CovarianceModel m;
    m.kind_ = Kind::Identity;
    m.dim_ = p;
    m.eigenvalues_ = Eigen::VectorXd::Ones(p);
    return m;
}

CovarianceModel CovarianceModel::spectrum(std::vector<double> eigenvalues) {
    if (eigenvalues.empty()) throw DimensionTooSmall("spectrum must be nonempty");
    CovarianceModel m;
    m.kind_ = Kind::Spectrum;
    m.dim_ = static_cast<int>(eigenvalues.size());
    m.eigenvalues_ = Eigen::Map<Eigen::VectorXd>(eigenvalues.data(), m.dim_);
    m.validate();
    return m;
}

CovarianceModel CovarianceModel::dense_spd(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
        throw DimensionTooSmall("dense covariance must be square and nonempty");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw OutOfRange("dense covariance must be symmetric within 1e-10");
    CovarianceModel m;
    m.kind_ = Kind::DenseSPD;
    m.dim_ = static_cast<int>(sigma.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success) throw NoConvergence("eigendecomposition of covariance failed");
    m.eigenvalues_ = es.eigenvalues();
    m.basis_ = std::make_shared<const Eigen::MatrixXd>(es.eigenvectors());
    m.dense_ = std::make_shared<const Eigen::MatrixXd>(sigma);
    m.validate();
    return m;
}

void CovarianceModel::validate() const {
    if (eigenvalues_.minCoeff() <= 0.0)
        throw OutOfRange("covariance eigenvalues must all be positive");
    if (!eigenvalues_.allFinite()) throw NonFinite("covariance eigenvalues must be finite");
}

Eigen::MatrixXd CovarianceModel::dense() const {
    if (dense_) return *dense_;
    return eigenvalues_.asDiagonal();
}

Eigen::VectorXd CovarianceModel::to_eigenbasis(const Eigen::VectorXd& x) const {
    if (basis_) return basis_->transpose() * x;
    return x;
}

Eigen::VectorXd CovarianceModel::from_eigenbasis(const Eigen::VectorXd& x) const {
    if (basis_) return (*basis_) * x;
    return x;
}

Eigen::VectorXd CovarianceModel::apply(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Identity) return x;
    if (kind_ == Kind::Spectrum) return eigenvalues_.cwiseProduct(x);
    return (*dense_) * x;
}

Eigen::VectorXd CovarianceModel::apply_inv(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Identity) return x;
    if (kind_ == Kind::Spectrum) return x.cwiseQuotient(eigenvalues_);
    return from_eigenbasis(to_eigenbasis(x).cwiseQuotient(eigenvalues_));
}

Eigen::VectorXd CovarianceModel::apply_sqrt(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Identity) return x;
    if (kind_ == Kind::Spectrum) return eigenvalues_.cwiseSqrt().cwiseProduct(x);
    return from_eigenbasis(eigenvalues_.cwiseSqrt().cwiseProduct(to_eigenbasis(x)));
}

Eigen::VectorXd CovarianceModel::apply_inv_sqrt(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Identity) return x;
    if (kind_ == Kind::Spectrum) return x.cwiseQuotient(eigenvalues_.cwiseSqrt());
    return from_eigenbasis(to_eigenbasis(x).cwiseQuotient(eigenvalues_.cwiseSqrt()));
}

double CovarianceModel::quad_form(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Identity) return x.squaredNorm();
    if (kind_ == Kind::Spectrum) return eigenvalues_.cwiseProduct(x).dot(x);
    return x.dot((*dense_) * x);
}

}  // namespace ampr
