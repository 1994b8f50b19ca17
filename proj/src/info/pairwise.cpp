#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "iife/info.hpp"
#include "iife/parallel.hpp"

namespace iife::info {

void sort_entries(std::vector<IIEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const IIEntry& a, const IIEntry& b) {
    if (a.tau != b.tau) return a.tau > b.tau;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
}

std::vector<FeaturePair> all_pairs(std::size_t n) {
  std::vector<FeaturePair> pairs;
  pairs.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

namespace {

std::vector<IIEntry> canonical_entries(std::span<const FeaturePair> pairs, std::size_t n_features) {
  std::vector<IIEntry> entries(pairs.size());
  std::set<FeaturePair> seen;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    if (i == j) throw std::invalid_argument("pairwise_ii: self-pair " + std::to_string(i));
    if (i > j) std::swap(i, j);
    if (j >= n_features) throw std::out_of_range("pairwise_ii: feature index out of range");
    if (!seen.emplace(i, j).second) {
      throw std::invalid_argument("pairwise_ii: duplicate pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
    }
    entries[p].i = i;
    entries[p].j = j;
  }
  return entries;
}

}  // namespace

std::vector<IIEntry> pairwise_ii(std::span<const FeaturePair> pairs,
                                 std::span<const VariableView> features, VariableView y,
                                 const EstimatorConfig& cfg, unsigned threads) {
  auto entries = canonical_entries(pairs, features.size());
  parallel_for(entries.size(), threads, [&](std::size_t p) {
    entries[p].tau = interaction_information(features[entries[p].i], features[entries[p].j], y, cfg);
  });
  sort_entries(entries);
  return entries;
}

std::vector<double> pairwise_marginals(std::span<const FeaturePair> pairs,
                                       std::span<const VariableView> features,
                                       const EstimatorConfig& cfg, unsigned threads) {
  const auto entries = canonical_entries(pairs, features.size());
  std::vector<double> out(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t p) {
    out[p] = marginal_term(features[entries[p].i], features[entries[p].j], cfg);
  });
  return out;
}

std::vector<IIEntry> pairwise_ii(std::span<const FeaturePair> pairs,
                                 std::span<const VariableView> features, VariableView y,
                                 const EstimatorConfig& cfg, unsigned threads,
                                 std::span<const double> marginals) {
  if (marginals.size() != pairs.size()) {
    throw std::invalid_argument("pairwise_ii: one marginal per pair is required");
  }
  auto entries = canonical_entries(pairs, features.size());
  parallel_for(entries.size(), threads, [&](std::size_t p) {
    entries[p].tau = interaction_information(features[entries[p].i], features[entries[p].j], y, cfg,
                                             marginals[p]);
  });
  sort_entries(entries);
  return entries;
}

std::vector<std::string> prefilter_features(const tabular::Table& t, std::size_t m,
                                            const EstimatorConfig& cfg) {
  if (m < 2) throw std::invalid_argument("prefilter size must be at least 2");
  const auto names = t.feature_names();
  if (m >= names.size()) return names;

  const Variable y = Variable::from_column(t.target());
  std::vector<double> scores(names.size());
  for (std::size_t f = 0; f < names.size(); ++f) {
    const Variable x = Variable::from_column(t.column(names[f]));
    scores[f] = knn_mi(x.view(), y.view(), cfg).nats;
  }
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(m);
  std::sort(order.begin(), order.end());
  std::vector<std::string> kept;
  for (auto f : order) kept.push_back(names[f]);
  return kept;
}

}  // namespace iife::info
