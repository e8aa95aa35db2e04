// Throughput comparison of the serial reference kernels against the
// OpenMP implementations.

#include <chrono>
#include <cstdio>

#include "ampr/parallel.hpp"
#include "ampr/rng.hpp"

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    ampr::SplitMix64 rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
    return m;
}

template <typename F>
double time_ms(F&& fn, int iters) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / iters;
}

}  // namespace

int main() {
    const int n = 3000;
    const int p = 1200;
    const Eigen::MatrixXd a = random_matrix(n, p, 7);
    const Eigen::VectorXd x = random_matrix(p, 1, 11);
    const Eigen::VectorXd y = random_matrix(n, 1, 13);

    Eigen::MatrixXd c;
    Eigen::VectorXd v;

    std::printf("kernel            serial_ms    omp_ms   speedup\n");

    const double gs = time_ms([&] { ampr::kernels::gram_serial(a, 1.0 / n, c); }, 3);
    const double go = time_ms([&] { ampr::kernels::gram_omp(a, 1.0 / n, c); }, 3);
    std::printf("gram %dx%d    %9.2f %9.2f   %6.2fx\n", n, p, gs, go, gs / go);

    const double ms = time_ms([&] { ampr::kernels::matvec_serial(a, x, v); }, 50);
    const double mo = time_ms([&] { ampr::kernels::matvec_omp(a, x, v); }, 50);
    std::printf("matvec            %9.3f %9.3f   %6.2fx\n", ms, mo, ms / mo);

    const double ts = time_ms([&] { ampr::kernels::matvec_t_serial(a, y, v); }, 50);
    const double to = time_ms([&] { ampr::kernels::matvec_t_omp(a, y, v); }, 50);
    std::printf("matvec_t          %9.3f %9.3f   %6.2fx\n", ts, to, ts / to);
    return 0;
}
