#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "iife/info.hpp"
#include "iife/random.hpp"

namespace iife::info {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// psi(1..n) for integer arguments: psi(m + 1) = psi(m) + 1/m.
std::vector<double> digamma_table(std::size_t n) {
  std::vector<double> table(n + 2);
  table[1] = -kEulerGamma;
  for (std::size_t m = 1; m + 1 < table.size(); ++m) {
    table[m + 1] = table[m] + 1.0 / static_cast<double>(m);
  }
  return table;
}

using Mask = unsigned;

// Points in a low-dimensional (d <= 3) mixed space supporting max-norm k-th
// neighbor radii and ball counts restricted to a coordinate subset. Every
// numeric coordinate keeps a copy of all coordinates permuted into its sorted
// order so window scans touch contiguous memory.
class MixedPoints {
 public:
  static constexpr std::size_t kMaxDims = 3;

  MixedPoints(std::vector<std::vector<double>> coords, std::vector<bool> categorical)
      : coords_(std::move(coords)), d_(coords_.size()) {
    if (d_ > kMaxDims) throw std::logic_error("MixedPoints supports at most 3 coordinates");
    n_ = coords_.empty() ? 0 : coords_.front().size();
    for (std::size_t c = 0; c < d_; ++c) categorical_[c] = categorical[c];
    for (std::size_t c = 0; c < d_; ++c) {
      if (categorical_[c]) continue;
      std::vector<std::size_t> order(n_);
      std::iota(order.begin(), order.end(), std::size_t{0});
      const auto& v = coords_[c];
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
      auto& view = sorted_[c];
      view.rank.resize(n_);
      for (std::size_t p = 0; p < n_; ++p) view.rank[order[p]] = p;
      for (std::size_t c2 = 0; c2 < d_; ++c2) {
        view.coords[c2].resize(n_);
        for (std::size_t p = 0; p < n_; ++p) view.coords[c2][p] = coords_[c2][order[p]];
      }
    }
    // Cell sizes for every all-categorical coordinate subset.
    cell_size_.resize(Mask{1} << d_);
    for (Mask mask = 1; mask < (Mask{1} << d_); ++mask) {
      if (first_numeric(mask) >= 0) continue;
      std::map<std::vector<double>, std::size_t> counts;
      std::vector<std::vector<double>> keys(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t c = 0; c < d_; ++c) {
          if (mask & (Mask{1} << c)) keys[i].push_back(coords_[c][i]);
        }
        ++counts[keys[i]];
      }
      cell_size_[mask].resize(n_);
      for (std::size_t i = 0; i < n_; ++i) cell_size_[mask][i] = counts[keys[i]];
    }
  }

  std::size_t size() const { return n_; }

  // Distance from point i to its k-th nearest other point.
  double kth_neighbor_distance(std::size_t i, int k, Mask mask) const {
    const auto kk = static_cast<std::size_t>(k);
    const int pivot = first_numeric(mask);
    if (pivot < 0) {
      return cell_size_[mask][i] - 1 >= kk ? 0.0 : 1.0;
    }
    const auto& view = sorted_[static_cast<std::size_t>(pivot)];
    const auto& key = view.coords[static_cast<std::size_t>(pivot)];
    const Probe probe = make_probe(i, mask, view);
    const std::size_t pos = view.rank[i];
    const double v = key[pos];

    // best[0..filled) kept ascending; best[kk-1] is the current radius.
    std::array<double, 64> small{};
    std::vector<double> large;
    double* best = small.data();
    if (kk > small.size()) {
      large.resize(kk);
      best = large.data();
    }
    std::size_t filled = 0;
    auto offer = [&](double dist) {
      if (filled == kk && dist >= best[kk - 1]) return;
      std::size_t slot = filled < kk ? filled++ : kk - 1;
      while (slot > 0 && best[slot - 1] > dist) {
        best[slot] = best[slot - 1];
        --slot;
      }
      best[slot] = dist;
    };

    std::ptrdiff_t left = static_cast<std::ptrdiff_t>(pos) - 1;
    std::size_t right = pos + 1;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    while (left >= 0 || right < n_) {
      const double gap_left = left >= 0 ? v - key[static_cast<std::size_t>(left)] : kInf;
      const double gap_right = right < n_ ? key[right] - v : kInf;
      const bool take_left = gap_left <= gap_right;
      const double gap = take_left ? gap_left : gap_right;
      if (filled == kk && gap > best[kk - 1]) break;
      const std::size_t p = take_left ? static_cast<std::size_t>(left--) : right++;
      offer(probe.distance(view, p));
    }
    return best[kk - 1];
  }

  // Number of points j != i with max-norm distance over `mask` <= radius.
  std::size_t count_within(std::size_t i, double radius, Mask mask) const {
    if (first_numeric(mask) < 0) {
      return radius >= 1.0 ? n_ - 1 : cell_size_[mask][i] - 1;
    }
    // Narrowest sorted window among the numeric coordinates of the mask.
    std::size_t best_lo = 0;
    std::size_t best_hi = n_ + 1;
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < d_; ++c) {
      if (!(mask & (Mask{1} << c)) || categorical_[c]) continue;
      const auto& key = sorted_[c].coords[c];
      const double v = coords_[c][i];
      auto lo = static_cast<std::size_t>(
          std::lower_bound(key.begin(), key.end(), v - radius) - key.begin());
      auto hi = static_cast<std::size_t>(
          std::upper_bound(key.begin(), key.end(), v + radius) - key.begin());
      // Rounding in v -/+ radius may misplace entries at the window edges.
      while (lo > 0 && std::abs(key[lo - 1] - v) <= radius) --lo;
      while (lo < hi && std::abs(key[lo] - v) > radius) ++lo;
      while (hi < n_ && std::abs(key[hi] - v) <= radius) ++hi;
      while (hi > lo && std::abs(key[hi - 1] - v) > radius) --hi;
      if (hi - lo < best_hi - best_lo) {
        best_lo = lo;
        best_hi = hi;
        best_c = c;
      }
    }
    if (mask == (Mask{1} << best_c)) return best_hi - best_lo - 1;  // window includes i

    const auto& view = sorted_[best_c];
    const Probe probe = make_probe(i, mask, view);
    std::size_t count = 0;
    for (std::size_t p = best_lo; p < best_hi; ++p) {
      if (probe.distance(view, p) <= radius) ++count;
    }
    return count - 1;  // i itself is at distance 0
  }

 private:
  struct SortedView {
    std::vector<std::size_t> rank;
    std::array<std::vector<double>, kMaxDims> coords;
  };

  // Coordinates of one query point restricted to a mask.
  struct Probe {
    std::array<std::size_t, kMaxDims> dims{};
    std::array<double, kMaxDims> values{};
    std::array<bool, kMaxDims> categorical{};
    std::size_t count = 0;

    double distance(const SortedView& view, std::size_t p) const {
      double d = 0.0;
      for (std::size_t t = 0; t < count; ++t) {
        const double other = view.coords[dims[t]][p];
        const double dc = categorical[t] ? (other == values[t] ? 0.0 : 1.0)
                                         : std::abs(other - values[t]);
        d = dc > d ? dc : d;
      }
      return d;
    }
  };

  Probe make_probe(std::size_t i, Mask mask, const SortedView&) const {
    Probe probe;
    for (std::size_t c = 0; c < d_; ++c) {
      if (!(mask & (Mask{1} << c))) continue;
      probe.dims[probe.count] = c;
      probe.values[probe.count] = coords_[c][i];
      probe.categorical[probe.count] = categorical_[c];
      ++probe.count;
    }
    return probe;
  }

  int first_numeric(Mask mask) const {
    for (std::size_t c = 0; c < d_; ++c) {
      if ((mask & (Mask{1} << c)) && !categorical_[c]) return static_cast<int>(c);
    }
    return -1;
  }

  std::vector<std::vector<double>> coords_;
  std::size_t d_ = 0;
  std::array<bool, kMaxDims> categorical_{};
  std::size_t n_ = 0;
  std::array<SortedView, kMaxDims> sorted_;
  std::vector<std::vector<std::size_t>> cell_size_;
};

// One variable gathered onto the sample and prepared for distances.
struct Prepared {
  std::vector<double> values;
  bool categorical = false;
  bool constant = false;
};

Prepared prepare(VariableView var, std::span<const std::size_t> rows) {
  Prepared p;
  p.categorical = var.kind == VarKind::Categorical;
  p.values.reserve(rows.size());
  for (auto r : rows) p.values.push_back(var.values[r]);
  if (p.values.empty()) {
    p.constant = true;
    return p;
  }
  if (p.categorical) {
    p.constant = std::all_of(p.values.begin(), p.values.end(),
                             [&](double v) { return v == p.values.front(); });
    return p;
  }
  const double n = static_cast<double>(p.values.size());
  const double mean = std::accumulate(p.values.begin(), p.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : p.values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    p.constant = true;
    std::fill(p.values.begin(), p.values.end(), 0.0);
    return p;
  }
  for (double& v : p.values) v = (v - mean) / sd;
  return p;
}

std::vector<std::size_t> sample_rows(std::size_t n, const EstimatorConfig& cfg) {
  if (n <= cfg.subsample_size) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  auto rows = seeded_sample(n, cfg.subsample_size, cfg.seed);
  std::sort(rows.begin(), rows.end());
  return rows;
}

void check_lengths(std::initializer_list<VariableView> vars, const EstimatorConfig& cfg) {
  cfg.validate();
  const std::size_t n = vars.begin()->size();
  for (const auto& v : vars) {
    if (v.size() != n) throw std::invalid_argument("estimator inputs differ in length");
  }
  const std::size_t used = std::min(n, cfg.subsample_size);
  if (used < 10 * static_cast<std::size_t>(cfg.k)) {
    throw std::invalid_argument("estimator needs at least 10*k samples, got " + std::to_string(used));
  }
}

Estimate mi_on_rows(VariableView x, VariableView y, std::span<const std::size_t> rows, int k) {
  Prepared px = prepare(x, rows);
  Prepared py = prepare(y, rows);
  if (px.constant || py.constant) return {0.0, true};
  const std::size_t n = rows.size();
  MixedPoints points({std::move(px.values), std::move(py.values)},
                     {px.categorical, py.categorical});
  const auto psi = digamma_table(n + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = points.kth_neighbor_distance(i, k, 0b11);
    const std::size_t k_tilde = points.count_within(i, rho, 0b11);
    const std::size_t nx = points.count_within(i, rho, 0b01);
    const std::size_t ny = points.count_within(i, rho, 0b10);
    total += psi[k_tilde] + psi[n] - psi[nx + 1] - psi[ny + 1];
  }
  return {std::max(0.0, total / static_cast<double>(n)), false};
}

Estimate cmi_on_rows(VariableView x, VariableView y, VariableView z,
                     std::span<const std::size_t> rows, int k) {
  Prepared px = prepare(x, rows);
  Prepared py = prepare(y, rows);
  Prepared pz = prepare(z, rows);
  if (px.constant || py.constant) return {0.0, true};
  const std::size_t n = rows.size();
  MixedPoints points({std::move(px.values), std::move(py.values), std::move(pz.values)},
                     {px.categorical, py.categorical, pz.categorical});
  const auto psi = digamma_table(n + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = points.kth_neighbor_distance(i, k, 0b111);
    const std::size_t k_tilde = points.count_within(i, rho, 0b111);
    const std::size_t nxz = points.count_within(i, rho, 0b101);
    const std::size_t nyz = points.count_within(i, rho, 0b110);
    const std::size_t nz = points.count_within(i, rho, 0b100);
    total += psi[k_tilde] - psi[nxz + 1] - psi[nyz + 1] + psi[nz + 1];
  }
  return {std::max(0.0, total / static_cast<double>(n)), false};
}

// Strict weak order over views so symmetric estimators see a fixed argument
// order regardless of call order.
bool view_less(VariableView a, VariableView b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(),
                                      b.values.end());
}

}  // namespace

void EstimatorConfig::validate() const {
  if (k < 1) throw std::invalid_argument("estimator k must be at least 1");
  if (subsample_size < 10 * static_cast<std::size_t>(k)) {
    throw std::invalid_argument("subsample_size must be at least 10*k");
  }
}

Variable Variable::from_column(const tabular::Column& column) {
  Variable v;
  if (column.is_categorical()) {
    v.kind = VarKind::Categorical;
    std::unordered_map<std::string, double> codes;
    v.values.reserve(column.size());
    for (const auto& s : column.symbols) {
      auto [it, inserted] = codes.emplace(s, static_cast<double>(codes.size()));
      v.values.push_back(it->second);
    }
    return v;
  }
  v.kind = VarKind::Numeric;
  double sum = 0.0;
  std::size_t count = 0;
  for (double x : column.numbers) {
    if (std::isnan(x)) continue;
    sum += x;
    ++count;
  }
  const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
  v.values.reserve(column.size());
  for (double x : column.numbers) v.values.push_back(std::isnan(x) ? fill : x);
  return v;
}

double plugin_entropy(std::span<const VariableView> vars) {
  if (vars.empty() || vars.front().size() == 0) {
    throw std::invalid_argument("plugin_entropy needs at least one non-empty variable");
  }
  const std::size_t n = vars.front().size();
  for (const auto& v : vars) {
    if (v.size() != n) throw std::invalid_argument("plugin_entropy inputs differ in length");
  }
  std::map<std::vector<double>, std::size_t> counts;
  std::vector<double> key(vars.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < vars.size(); ++c) key[c] = vars[c].values[r];
    ++counts[key];
  }
  double h = 0.0;
  for (const auto& [cell, count] : counts) {
    const double p = static_cast<double>(count) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

Estimate knn_mi(VariableView x, VariableView y, const EstimatorConfig& cfg) {
  check_lengths({x, y}, cfg);
  const auto rows = sample_rows(x.size(), cfg);
  if (view_less(y, x)) std::swap(x, y);
  return mi_on_rows(x, y, rows, cfg.k);
}

Estimate knn_cmi(VariableView x, VariableView y, VariableView z, const EstimatorConfig& cfg) {
  check_lengths({x, y, z}, cfg);
  const auto rows = sample_rows(x.size(), cfg);
  if (view_less(y, x)) std::swap(x, y);
  return cmi_on_rows(x, y, z, rows, cfg.k);
}

double interaction_information(VariableView fi, VariableView fj, VariableView y,
                               const EstimatorConfig& cfg) {
  check_lengths({fi, fj, y}, cfg);
  const auto rows = sample_rows(fi.size(), cfg);
  if (view_less(fj, fi)) std::swap(fi, fj);
  const Estimate conditional = cmi_on_rows(fi, fj, y, rows, cfg.k);
  const Estimate marginal = mi_on_rows(fi, fj, rows, cfg.k);
  return conditional.nats - marginal.nats;
}

double marginal_term(VariableView fi, VariableView fj, const EstimatorConfig& cfg) {
  check_lengths({fi, fj}, cfg);
  const auto rows = sample_rows(fi.size(), cfg);
  if (view_less(fj, fi)) std::swap(fi, fj);
  return mi_on_rows(fi, fj, rows, cfg.k).nats;
}

double interaction_information(VariableView fi, VariableView fj, VariableView y,
                               const EstimatorConfig& cfg, double marginal) {
  check_lengths({fi, fj, y}, cfg);
  const auto rows = sample_rows(fi.size(), cfg);
  if (view_less(fj, fi)) std::swap(fi, fj);
  return cmi_on_rows(fi, fj, y, rows, cfg.k).nats - marginal;
}

}  // namespace iife::info
