#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "iife/tabular.hpp"

namespace iife::synthetic {

// d standard-normal numeric columns named F1..Fd.
std::vector<tabular::Column> gaussian_features(std::size_t n, std::size_t d, std::uint64_t seed);

using TargetFn = std::function<double(double, double)>;

// Regression table over gaussian_features with target
// y = fn(F1, F2) + noise * N(0, 1).
tabular::Table planted_table(std::size_t n, std::size_t d, const TargetFn& fn, double noise,
                             std::uint64_t seed, const std::string& target = "y");

tabular::Table planted_product(std::size_t n, std::size_t d, double noise, std::uint64_t seed);

}  // namespace iife::synthetic
