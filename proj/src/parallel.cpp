#include "ampr/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampr::kernels {

namespace {
Backend g_backend = Backend::OpenMP;
}

Backend active_backend() { return g_backend; }
void set_active_backend(Backend b) { g_backend = b; }

void gram_serial(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& c) {
    const Eigen::Index p = a.cols();
    c.resize(p, p);
    c.setZero();
    c.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(), scale);
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
}

void gram_omp(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& c) {
    const Eigen::Index p = a.cols();
    c.resize(p, p);
    // column blocks are independent; each thread fills full columns of the
    // lower triangle so no write conflicts arise
    const Eigen::Index block = 64;
    const Eigen::Index nblocks = (p + block - 1) / block;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index bj = 0; bj < nblocks; ++bj) {
        const Eigen::Index j0 = bj * block;
        const Eigen::Index jn = std::min(block, p - j0);
        c.block(j0, j0, p - j0, jn).noalias() =
            scale * (a.middleCols(j0, p - j0).transpose() * a.middleCols(j0, jn));
    }
    c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, double scale) {
    Eigen::MatrixXd c;
    if (g_backend == Backend::OpenMP)
        gram_omp(a, scale, c);
    else
        gram_serial(a, scale, c);
    return c;
}

void matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = a * x;
}

void matvec_omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::Index n = a.rows();
    y.resize(n);
    const Eigen::Index block = 256;
    const Eigen::Index nblocks = (n + block - 1) / block;
#pragma omp parallel for schedule(static)
    for (Eigen::Index bi = 0; bi < nblocks; ++bi) {
        const Eigen::Index i0 = bi * block;
        const Eigen::Index in = std::min(block, n - i0);
        y.segment(i0, in).noalias() = a.middleRows(i0, in) * x;
    }
}

Eigen::VectorXd matvec(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
    Eigen::VectorXd y;
    if (g_backend == Backend::OpenMP)
        matvec_omp(a, x, y);
    else
        matvec_serial(a, x, y);
    return y;
}

void matvec_t_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = a.transpose() * x;
}

void matvec_t_omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::Index p = a.cols();
    y.resize(p);
    const Eigen::Index block = 256;
    const Eigen::Index nblocks = (p + block - 1) / block;
#pragma omp parallel for schedule(static)
    for (Eigen::Index bj = 0; bj < nblocks; ++bj) {
        const Eigen::Index j0 = bj * block;
        const Eigen::Index jn = std::min(block, p - j0);
        y.segment(j0, jn).noalias() = a.middleCols(j0, jn).transpose() * x;
    }
}

Eigen::VectorXd matvec_t(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) {
    Eigen::VectorXd y;
    if (g_backend == Backend::OpenMP)
        matvec_t_omp(a, x, y);
    else
        matvec_t_serial(a, x, y);
    return y;
}

}  // namespace ampr::kernels
