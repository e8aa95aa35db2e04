#pragma once

#include <Eigen/Dense>

// Dense kernels on the hot paths (gram matrices, design matvecs).
// Each kernel has a serial reference implementation and an OpenMP one;
// tests assert they agree and tools/bench_kernels compares throughput.

namespace ampr::kernels {

enum class Backend { Serial, OpenMP };

// Active backend for the convenience wrappers below. Defaults to OpenMP.
Backend active_backend();
void set_active_backend(Backend b);

// C = scale * A^T A  (C is p x p symmetric, A is n x p)
void gram_serial(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& c);
void gram_omp(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& c);
Eigen::MatrixXd gram(const Eigen::MatrixXd& a, double scale);

// y = A x
void matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void matvec_omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
Eigen::VectorXd matvec(const Eigen::MatrixXd& a, const Eigen::VectorXd& x);

// y = A^T x
void matvec_t_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void matvec_t_omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
Eigen::VectorXd matvec_t(const Eigen::MatrixXd& a, const Eigen::VectorXd& x);

}  // namespace ampr::kernels
