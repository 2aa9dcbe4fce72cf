#pragma once

#include <filesystem>
#include <random>
#include <string>

// Paths baked in by the build: the shipped fixtures and the CLI binary.
#ifndef COHORTLAB_DATA_DIR
#define COHORTLAB_DATA_DIR "data"
#endif

namespace testsupport {

inline std::filesystem::path data_dir() { return COHORTLAB_DATA_DIR; }

inline std::filesystem::path fixture(const std::string& name) {
    return data_dir() / name;
}

// Deterministic generator for property-style tests.
inline std::mt19937_64 property_rng(std::uint64_t seed) {
    return std::mt19937_64{seed};
}

inline bool close_rel(double actual, double expected, double rel_tol) {
    const double diff = std::abs(actual - expected);
    const double scale = std::max(std::abs(actual), std::abs(expected));
    return diff <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace testsupport
