#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ampr/parallel.hpp"
#include "ampr/rng.hpp"

using namespace ampr;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
    return m;
}

}  // namespace

TEST_CASE("gram kernels agree between serial and OpenMP backends") {
    const Eigen::MatrixXd a = random_matrix(157, 83, 1);
    Eigen::MatrixXd cs, co;
    kernels::gram_serial(a, 1.0 / 157, cs);
    kernels::gram_omp(a, 1.0 / 157, co);
    CHECK((cs - co).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cs - cs.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matvec kernels agree between serial and OpenMP backends") {
    const Eigen::MatrixXd a = random_matrix(311, 95, 2);
    const Eigen::VectorXd x = random_matrix(95, 1, 3);
    const Eigen::VectorXd y = random_matrix(311, 1, 4);

    Eigen::VectorXd vs, vo;
    kernels::matvec_serial(a, x, vs);
    kernels::matvec_omp(a, x, vo);
    CHECK((vs - vo).cwiseAbs().maxCoeff() < 1e-12);

    kernels::matvec_t_serial(a, y, vs);
    kernels::matvec_t_omp(a, y, vo);
    CHECK((vs - vo).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backend switch routes the convenience wrappers") {
    const Eigen::MatrixXd a = random_matrix(64, 32, 5);
    kernels::set_active_backend(kernels::Backend::Serial);
    const Eigen::MatrixXd c1 = kernels::gram(a, 0.5);
    kernels::set_active_backend(kernels::Backend::OpenMP);
    const Eigen::MatrixXd c2 = kernels::gram(a, 0.5);
    CHECK((c1 - c2).cwiseAbs().maxCoeff() < 1e-12);
}
