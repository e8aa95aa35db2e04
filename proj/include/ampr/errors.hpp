#pragma once

#include <stdexcept>
#include <string>

namespace ampr {

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error("NoConvergence: " + what) {}
};

struct InfeasibleRegime : std::runtime_error {
    explicit InfeasibleRegime(const std::string& what) : std::runtime_error("InfeasibleRegime: " + what) {}
};

struct HeritabilityOutOfRange : std::runtime_error {
    explicit HeritabilityOutOfRange(const std::string& what) : std::runtime_error("HeritabilityOutOfRange: " + what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error("NonFinite: " + what) {}
};

struct AlphaBelowMin : std::runtime_error {
    explicit AlphaBelowMin(const std::string& what) : std::runtime_error("AlphaBelowMin: " + what) {}
};

struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error("BracketFailure: " + what) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error("OutOfRange: " + what) {}
};

struct DimensionTooSmall : std::runtime_error {
    explicit DimensionTooSmall(const std::string& what) : std::runtime_error("DimensionTooSmall: " + what) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error("SingularSystem: " + what) {}
};

struct Diverged : std::runtime_error {
    explicit Diverged(const std::string& what) : std::runtime_error("Diverged: " + what) {}
};

struct NonPositiveRho : std::runtime_error {
    explicit NonPositiveRho(const std::string& what) : std::runtime_error("NonPositiveRho: " + what) {}
};

struct ConfigParse : std::runtime_error {
    explicit ConfigParse(const std::string& what) : std::runtime_error("ConfigParse: " + what) {}
};

}  // namespace ampr
