#include "ampr/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ampr/errors.hpp"
#include "ampr/rng.hpp"

namespace ampr {

namespace {

constexpr char kMagic[5] = {'A', 'M', 'P', 'R', '1'};

Eigen::MatrixXd gaussian_design(int n, int p, const CovarianceModel& sigma, SplitMix64& rng) {
    Eigen::MatrixXd m(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = rng.next_gaussian();
    if (sigma.is_identity()) return m;
    if (sigma.kind() == CovarianceModel::Kind::Spectrum) {
        const Eigen::VectorXd sqrt_ev = sigma.eigenvalues().cwiseSqrt();
        for (int j = 0; j < p; ++j) m.col(j) *= sqrt_ev[j];
        return m;
    }
    // rows times Sigma^{1/2}
    for (int i = 0; i < n; ++i) m.row(i) = sigma.apply_sqrt(m.row(i).transpose()).transpose();
    return m;
}

}  // namespace

SyntheticDataset generate(const ProblemSpec& spec, int p, std::uint64_t seed) {
    if (p < 50) throw DimensionTooSmall("generate requires p >= 50");
    if (p > 10000) throw OutOfRange("dense storage is capped at p = 10000");
    const int n_x = static_cast<int>(std::lround(p / spec.gamma_x));
    const int n_w = static_cast<int>(std::lround(p / spec.gamma_w));
    const int n_s = static_cast<int>(std::lround(p / spec.gamma_s));
    if (n_x < 10 || n_w < 10 || n_s < 10)
        throw DimensionTooSmall("sample sizes implied by the aspect ratios are below 10");

    CovarianceModel sigma = spec.covariance;
    if (sigma.is_identity()) {
        sigma = CovarianceModel::identity(p);
    } else if (sigma.dim() != p) {
        throw DimensionTooSmall("covariance dimension does not match requested p");
    }

    SyntheticDataset d;
    d.seed = seed;
    d.sigma = sigma;

    SplitMix64 rng(derive_seed(seed, 0));
    // beta0 entries i.i.d. prior / sqrt(p): covariance Sigma_beta0 / p
    const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));
    d.beta0.resize(p);
    for (int j = 0; j < p; ++j) d.beta0[j] = spec.prior.sample(rng) * inv_sqrt_p;

    SplitMix64 rng_x(derive_seed(seed, 1));
    SplitMix64 rng_w(derive_seed(seed, 2));
    SplitMix64 rng_s(derive_seed(seed, 3));
    SplitMix64 rng_eps(derive_seed(seed, 4));
    d.x = gaussian_design(n_x, p, sigma, rng_x);
    d.w = gaussian_design(n_w, p, sigma, rng_w);
    d.s = gaussian_design(n_s, p, sigma, rng_s);

    // noise scaled to the realized signal strength of this replicate
    const double signal = sigma.quad_form(d.beta0);
    const double sd_x = std::sqrt(signal * (1.0 - spec.h2_x) / spec.h2_x);
    const double sd_s = std::sqrt(signal * (1.0 - spec.h2_s) / spec.h2_s);

    d.y_x = d.x * d.beta0;
    for (int i = 0; i < n_x; ++i) d.y_x[i] += sd_x * rng_eps.next_gaussian();
    d.y_s = d.s * d.beta0;
    for (int i = 0; i < n_s; ++i) d.y_s[i] += sd_s * rng_eps.next_gaussian();
    return d;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size());
}

Eigen::MatrixXd get_matrix(std::istream& in) {
    const auto rows = static_cast<Eigen::Index>(get_u64(in));
    const auto cols = static_cast<Eigen::Index>(get_u64(in));
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), sizeof(double) * m.size());
    return m;
}

}  // namespace

void save_dataset(const SyntheticDataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutOfRange("cannot open dataset file for writing: " + path);
    out.write(kMagic, 5);
    put_u64(out, d.seed);
    const std::uint64_t sigma_kind = static_cast<std::uint64_t>(d.sigma.kind());
    put_u64(out, sigma_kind);
    if (d.sigma.kind() == CovarianceModel::Kind::Identity) {
        put_u64(out, static_cast<std::uint64_t>(d.sigma.dim()));
    } else if (d.sigma.kind() == CovarianceModel::Kind::Spectrum) {
        put_matrix(out, d.sigma.eigenvalues());
    } else {
        put_matrix(out, d.sigma.dense());
    }
    put_matrix(out, d.beta0);
    put_matrix(out, d.y_x);
    put_matrix(out, d.y_s);
    put_matrix(out, d.x);
    put_matrix(out, d.w);
    put_matrix(out, d.s);
    if (!out) throw OutOfRange("write failed for dataset file: " + path);
}

SyntheticDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutOfRange("cannot open dataset file: " + path);
    char magic[5];
    in.read(magic, 5);
    if (std::memcmp(magic, kMagic, 5) != 0) throw OutOfRange("bad magic in dataset file: " + path);

    SyntheticDataset d;
    d.seed = get_u64(in);
    const auto kind = static_cast<CovarianceModel::Kind>(get_u64(in));
    if (kind == CovarianceModel::Kind::Identity) {
        d.sigma = CovarianceModel::identity(static_cast<int>(get_u64(in)));
    } else if (kind == CovarianceModel::Kind::Spectrum) {
        const Eigen::MatrixXd ev = get_matrix(in);
        d.sigma = CovarianceModel::spectrum(
            std::vector<double>(ev.data(), ev.data() + ev.size()));
    } else {
        d.sigma = CovarianceModel::dense_spd(get_matrix(in));
    }
    d.beta0 = get_matrix(in);
    d.y_x = get_matrix(in);
    d.y_s = get_matrix(in);
    d.x = get_matrix(in);
    d.w = get_matrix(in);
    d.s = get_matrix(in);
    if (!in) throw OutOfRange("dataset file truncated: " + path);
    return d;
}

}  // namespace ampr
