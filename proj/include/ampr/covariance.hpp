#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace ampr {

// Predictor covariance. Identity and Spectrum are diagonal in the
// coordinate basis; DenseSPD keeps its eigendecomposition cached so all
// downstream spectral evaluations reuse it.
class CovarianceModel {
public:
    enum class Kind { Identity, Spectrum, DenseSPD };

    static CovarianceModel identity(int p);
    static CovarianceModel spectrum(std::vector<double> eigenvalues);
    static CovarianceModel dense_spd(const Eigen::MatrixXd& sigma);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_identity() const { return kind_ == Kind::Identity; }

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    double mean_eigenvalue() const { return eigenvalues_.mean(); }

    // Dense Sigma (materialized on demand for Identity/Spectrum).
    Eigen::MatrixXd dense() const;

    // Sigma x, Sigma^{-1} x, Sigma^{1/2} x, Sigma^{-1/2} x. For Spectrum
    // these are diagonal scalings; for DenseSPD they go through the
    // eigenbasis.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_inv(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_sqrt(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_inv_sqrt(const Eigen::VectorXd& x) const;

    // x^T Sigma x
    double quad_form(const Eigen::VectorXd& x) const;

    // Rotate into / out of the eigenbasis (identity map unless DenseSPD).
    Eigen::VectorXd to_eigenbasis(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_eigenbasis(const Eigen::VectorXd& x) const;

private:
    CovarianceModel() = default;
    void validate() const;

    Kind kind_ = Kind::Identity;
    int dim_ = 0;
    Eigen::VectorXd eigenvalues_;
    // eigenvectors, only populated for DenseSPD
    std::shared_ptr<const Eigen::MatrixXd> basis_;
    std::shared_ptr<const Eigen::MatrixXd> dense_;
};

}  // namespace ampr
