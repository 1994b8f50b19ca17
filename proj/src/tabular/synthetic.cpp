#include "iife/synthetic.hpp"

#include "iife/random.hpp"

namespace iife::synthetic {

std::vector<tabular::Column> gaussian_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> values(d, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) values[c][r] = rng.normal();
  }
  std::vector<tabular::Column> columns;
  for (std::size_t c = 0; c < d; ++c) {
    columns.push_back(tabular::Column::numeric("F" + std::to_string(c + 1), std::move(values[c])));
  }
  return columns;
}

tabular::Table planted_table(std::size_t n, std::size_t d, const TargetFn& fn, double noise,
                             std::uint64_t seed, const std::string& target) {
  auto columns = gaussian_features(n, d, seed);
  Rng noise_rng(mix_seed(seed, 1));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = fn(columns[0].numbers[r], columns[1].numbers[r]) + noise * noise_rng.normal();
  }
  columns.push_back(tabular::Column::numeric(target, std::move(y)));
  return tabular::Table(std::move(columns), target, tabular::TaskKind::Regression);
}

tabular::Table planted_product(std::size_t n, std::size_t d, double noise, std::uint64_t seed) {
  return planted_table(n, d, [](double a, double b) { return a * b; }, noise, seed);
}

}  // namespace iife::synthetic
