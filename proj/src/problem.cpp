#include "ampr/problem.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ampr/errors.hpp"

namespace ampr {

void ProblemSpec::validate() const {
    if (!(gamma_x > 0.0 && gamma_w > 0.0 && gamma_s > 0.0))
        throw OutOfRange("aspect ratios must be strictly positive");
    if (!(h2_x > 0.0 && h2_x < 1.0))
        throw HeritabilityOutOfRange("h2_x must lie strictly inside (0, 1)");
    if (!(h2_s > 0.0 && h2_s < 1.0))
        throw HeritabilityOutOfRange("h2_s must lie strictly inside (0, 1)");
    if (!(signal_strength() > 0.0)) throw OutOfRange("signal second moment must be positive");
}

double ProblemSpec::signal_strength() const {
    return prior.second_moment() * covariance.mean_eigenvalue();
}

double noise_variance(const ProblemSpec& spec, double h2) {
    if (!(h2 > 0.0 && h2 < 1.0))
        throw HeritabilityOutOfRange("heritability must lie strictly inside (0, 1)");
    return spec.signal_strength() * (1.0 - h2) / h2;
}

ScalingRecord ScalingRecord::inverse() const {
    return {1.0 / beta, 1.0 / x, 1.0 / w, 1.0 / eps_x, 1.0 / y_x, 1.0 / lambda};
}

ScalingRecord ScalingRecord::compose(const ScalingRecord& then) const {
    return {beta * then.beta, x * then.x, w * then.w, eps_x * then.eps_x, y_x * then.y_x, lambda * then.lambda};
}

ScalingRecord convert_normalization(const ProblemSpec& spec, int p, NormalizationDirection direction) {
    if (p <= 0) throw DimensionTooSmall("normalization conversion needs finite p > 0");
    const double sp = std::sqrt(static_cast<double>(p));
    const double nx = std::sqrt(static_cast<double>(p) / spec.gamma_x);
    const double nw = std::sqrt(static_cast<double>(p) / spec.gamma_w);
    const double gx = std::sqrt(spec.gamma_x);
    ScalingRecord to_appendix{1.0 / sp, nx, nw, 1.0 / gx, 1.0 / gx, 1.0 / sp};
    if (direction == NormalizationDirection::ToAppendix) return to_appendix;
    return to_appendix.inverse();
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigParse("bad numeric value for key '" + key + "': '" + value + "'");
    }
}

}  // namespace

ProblemSpec parse_problem_spec(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigParse("expected key = value, got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    ProblemSpec spec;
    auto take = [&](const std::string& key, double fallback, bool required = false) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required) throw ConfigParse("missing required key: " + key);
            return fallback;
        }
        double v = to_double(key, it->second);
        kv.erase(it);
        return v;
    };

    spec.gamma_x = take("gamma_x", spec.gamma_x, true);
    spec.gamma_w = take("gamma_w", spec.gamma_w, true);
    spec.gamma_s = take("gamma_s", spec.gamma_x);
    spec.h2_x = take("h2_x", spec.h2_x, true);
    spec.h2_s = take("h2_s", spec.h2_x);

    std::string prior_kind = "bernoulli_gaussian";
    if (auto it = kv.find("prior.kind"); it != kv.end()) {
        prior_kind = it->second;
        kv.erase(it);
    }
    if (prior_kind == "bernoulli_gaussian") {
        double kappa = take("prior.kappa", 0.05);
        double s2 = take("prior.sigma_beta2", 1.0);
        spec.prior = SignalPrior::bernoulli_gaussian(kappa, s2);
    } else {
        throw ConfigParse("unsupported prior.kind in config: " + prior_kind);
    }

    std::string cov_kind = "identity";
    if (auto it = kv.find("covariance.kind"); it != kv.end()) {
        cov_kind = it->second;
        kv.erase(it);
    }
    if (cov_kind == "identity") {
        int p = static_cast<int>(take("covariance.p", 1));
        spec.covariance = CovarianceModel::identity(p);
    } else if (cov_kind == "spectrum") {
        auto it = kv.find("covariance.eigenvalues");
        if (it == kv.end()) throw ConfigParse("spectrum covariance requires covariance.eigenvalues");
        std::vector<double> evals;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) evals.push_back(to_double("covariance.eigenvalues", tok));
        }
        kv.erase(it);
        if (evals.empty()) throw ConfigParse("covariance.eigenvalues is empty");
        spec.covariance = CovarianceModel::spectrum(std::move(evals));
    } else {
        throw ConfigParse("unsupported covariance.kind in config: " + cov_kind);
    }

    spec.validate();
    return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParse("cannot open config file: " + path);
    return parse_problem_spec(in);
}

void write_problem_spec(const ProblemSpec& spec, std::ostream& out) {
    out << "gamma_x = " << spec.gamma_x << "\n";
    out << "gamma_w = " << spec.gamma_w << "\n";
    out << "gamma_s = " << spec.gamma_s << "\n";
    out << "h2_x = " << spec.h2_x << "\n";
    out << "h2_s = " << spec.h2_s << "\n";
    if (spec.prior.kind() == SignalPrior::Kind::BernoulliGaussian) {
        out << "prior.kind = bernoulli_gaussian\n";
        out << "prior.kappa = " << spec.prior.kappa() << "\n";
        out << "prior.sigma_beta2 = " << spec.prior.sigma_beta2() << "\n";
    } else {
        throw ConfigParse("only bernoulli_gaussian priors serialize to config files");
    }
    if (spec.covariance.kind() == CovarianceModel::Kind::Identity) {
        out << "covariance.kind = identity\n";
        out << "covariance.p = " << spec.covariance.dim() << "\n";
    } else if (spec.covariance.kind() == CovarianceModel::Kind::Spectrum) {
        out << "covariance.kind = spectrum\n";
        out << "covariance.eigenvalues = ";
        const auto& ev = spec.covariance.eigenvalues();
        for (int i = 0; i < ev.size(); ++i) out << (i ? "," : "") << ev[i];
        out << "\n";
    } else {
        throw ConfigParse("dense covariances do not serialize to config files");
    }
}

}  // namespace ampr
