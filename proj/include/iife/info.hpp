#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iife/tabular.hpp"

// Nonparametric information estimators over mixed discrete/continuous data.
//
// Numeric coordinates are standardized over the (sub)sample and compared with
// absolute difference; categorical coordinates are compared by equality
// (distance 0 or 1). Joint spaces use the max-norm.
namespace iife::info {

enum class VarKind { Numeric, Categorical };

// Non-owning per-row values of one variable. Categorical values are integer
// codes stored as doubles.
struct VariableView {
  std::span<const double> values;
  VarKind kind = VarKind::Numeric;

  std::size_t size() const { return values.size(); }
};

struct Variable {
  std::vector<double> values;
  VarKind kind = VarKind::Numeric;

  VariableView view() const { return {values, kind}; }

  // Categorical columns become first-appearance codes; missing numeric cells
  // take the column mean.
  static Variable from_column(const tabular::Column& column);
  static Variable numeric(std::vector<double> values) { return {std::move(values), VarKind::Numeric}; }
  static Variable categorical(std::vector<double> codes) { return {std::move(codes), VarKind::Categorical}; }
};

struct EstimatorConfig {
  int k = 3;
  std::size_t subsample_size = 3000;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on k < 1 or subsample_size < 10k.
  void validate() const;
};

struct Estimate {
  double nats = 0.0;
  // Set when an input variable was constant on the sample; nats is then 0.
  bool degenerate = false;
};

// Exact plug-in Shannon entropy (nats) of the joint empirical distribution of
// one or more categorical variables.
double plugin_entropy(std::span<const VariableView> vars);

// KSG-style mutual information with the mixed-data tie rule: k~ counts every
// point within the k-th neighbor radius, so ties and discrete atoms are
// handled. Clamped below at 0.
Estimate knn_mi(VariableView x, VariableView y, const EstimatorConfig& cfg);

// Conditional mutual information I(x; y | z), same conventions as knn_mi.
Estimate knn_cmi(VariableView x, VariableView y, VariableView z, const EstimatorConfig& cfg);

// tau = I(fi; fj | y) - I(fi; fj), both terms on one shared subsample.
// Positive values mean synergy, negative values redundancy. Symmetric in
// (fi, fj) to the last bit.
double interaction_information(VariableView fi, VariableView fj, VariableView y,
                               const EstimatorConfig& cfg);

// The I(fi; fj) term of interaction_information on the same subsample. It
// does not involve y, so it can be reused across targets.
double marginal_term(VariableView fi, VariableView fj, const EstimatorConfig& cfg);

// interaction_information with a precomputed marginal_term.
double interaction_information(VariableView fi, VariableView fj, VariableView y,
                               const EstimatorConfig& cfg, double marginal);

// Scored feature pair; i < j always.
struct IIEntry {
  double tau = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;

  bool operator==(const IIEntry&) const = default;
};

using FeaturePair = std::pair<std::size_t, std::size_t>;

// Descending tau, ties broken by ascending (i, j).
void sort_entries(std::vector<IIEntry>& entries);

// Scores each pair of `features` against y. Pairs are canonicalized to i < j;
// duplicates and self-pairs are rejected. Output is sorted with sort_entries
// and does not depend on `threads`.
std::vector<IIEntry> pairwise_ii(std::span<const FeaturePair> pairs,
                                 std::span<const VariableView> features, VariableView y,
                                 const EstimatorConfig& cfg, unsigned threads = 1);

// marginal_term for each pair, in input order.
std::vector<double> pairwise_marginals(std::span<const FeaturePair> pairs,
                                       std::span<const VariableView> features,
                                       const EstimatorConfig& cfg, unsigned threads = 1);

// pairwise_ii reusing marginals[p] for pairs[p]; identical results.
std::vector<IIEntry> pairwise_ii(std::span<const FeaturePair> pairs,
                                 std::span<const VariableView> features, VariableView y,
                                 const EstimatorConfig& cfg, unsigned threads,
                                 std::span<const double> marginals);

// All C(n, 2) pairs in lexicographic order.
std::vector<FeaturePair> all_pairs(std::size_t n);

// Keeps the m features with the largest knn_mi against the target, in table
// order. m >= feature count returns every feature.
std::vector<std::string> prefilter_features(const tabular::Table& t, std::size_t m,
                                            const EstimatorConfig& cfg);

}  // namespace iife::info
