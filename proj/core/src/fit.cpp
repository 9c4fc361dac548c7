#include "protoseg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "protoseg/error.hpp"

namespace protoseg {

void FitConfig::validate() const {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (gamma && !(*gamma >= 0.0 && std::isfinite(*gamma))) {
    throw ParameterError("gamma must be a finite value >= 0");
  }
  if (restarts < 1) throw ParameterError("restarts must be >= 1");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw ParameterError("tol must be >= 0");
}

GammaEstimate estimate_gamma(const MixedDataset& data) {
  const std::size_t n = data.size();
  const std::size_t mr = data.numeric_count();
  const std::size_t mc = data.categorical_count();
  if (mr == 0 || mc == 0) {
    throw ParameterError("gamma estimation needs at least one numeric and one categorical attribute");
  }
  if (n < 2) throw ParameterError("gamma estimation needs at least two records");

  double variance_sum = 0.0;
  for (std::size_t j = 0; j < mr; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += data.numeric(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = data.numeric(i, j) - mean;
      ss += d * d;
    }
    variance_sum += ss / static_cast<double>(n - 1);
  }
  const double mean_variance = variance_sum / static_cast<double>(mr);

  double gini_sum = 0.0;
  for (std::size_t j = 0; j < mc; ++j) {
    const auto& dict = data.schema().categorical()[j].dictionary;
    // Last bucket collects kUnknownCode.
    std::vector<std::size_t> counts(dict.size() + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Code c = data.categorical(i, j);
      ++counts[c == kUnknownCode ? dict.size() : static_cast<std::size_t>(c)];
    }
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      sum_sq += p * p;
    }
    gini_sum += 1.0 - sum_sq;
  }
  const double mean_gini = gini_sum / static_cast<double>(mc);
  if (!(mean_gini > 0.0)) {
    throw DegenerateCategoricalsError("every categorical attribute is constant; gamma is undefined");
  }

  GammaEstimate out;
  if (!(mean_variance > 0.0)) {
    out.value = kGammaFloor;
    out.numeric_degenerate = true;
  } else {
    out.value = mean_variance / mean_gini;
  }
  return out;
}

GammaEstimate resolve_gamma(const MixedDataset& data, const FitConfig& cfg) {
  if (cfg.gamma) {
    if (!(*cfg.gamma >= 0.0)) throw ParameterError("gamma must be >= 0");
    return {*cfg.gamma, false, "explicit"};
  }
  if (data.categorical_count() == 0) return {0.0, false, "not-applicable:no-categorical-attributes"};
  if (data.numeric_count() == 0) return {1.0, false, "unit:no-numeric-attributes"};
  return estimate_gamma(data);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

SplitRng::SplitRng(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t x = seed;
  std::uint64_t key = splitmix64(x) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  for (auto& s : s_) s = splitmix64(key);
}

// xoshiro256**
std::uint64_t SplitRng::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double SplitRng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitRng::below(std::uint64_t bound) noexcept {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

namespace {

bool same_record(RecordView a, RecordView b) {
  return std::equal(a.numeric.begin(), a.numeric.end(), b.numeric.begin(), b.numeric.end()) &&
         std::equal(a.categorical.begin(), a.categorical.end(), b.categorical.begin(), b.categorical.end());
}

double distance(RecordView r, const Prototype& p, double gamma) noexcept {
  double d = detail::sqdist(r.numeric, p.numeric_center);
  if (gamma != 0.0) d += gamma * static_cast<double>(detail::mismatches(r.categorical, p.categorical_mode));
  return d;
}

std::vector<Prototype> init_random_records(const MixedDataset& data, std::size_t k, SplitRng& rng) {
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  // Lazy Fisher-Yates: draw until k pairwise-distinct records are held.
  for (std::size_t pos = 0; pos < n && chosen.size() < k; ++pos) {
    const std::size_t pick = pos + static_cast<std::size_t>(rng.below(n - pos));
    std::swap(order[pos], order[pick]);
    const std::size_t candidate = order[pos];
    const bool duplicate = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
      return same_record(data.record(c), data.record(candidate));
    });
    if (!duplicate) chosen.push_back(candidate);
  }
  if (chosen.size() < k) throw InfeasibleKError("k exceeds the number of distinct records");
  std::vector<Prototype> out;
  out.reserve(k);
  for (std::size_t c : chosen) out.push_back(Prototype::seed(data.record(c), data.schema()));
  return out;
}

std::vector<Prototype> init_plus_plus(const MixedDataset& data, std::size_t k, double gamma, SplitRng& rng) {
  const std::size_t n = data.size();
  std::vector<Prototype> out;
  out.reserve(k);
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.below(n)));
  out.push_back(Prototype::seed(data.record(chosen.back()), data.schema()));

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = distance(data.record(i), out.back(), gamma);

  while (out.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;

    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        last_positive = i;
        cumulative += nearest[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // All weights vanish (gamma = 0 hides categorical differences): fall back
      // to a uniform draw among records not identical to a chosen center.
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < n; ++i) {
        const bool duplicate = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
          return same_record(data.record(c), data.record(i));
        });
        if (!duplicate) candidates.push_back(i);
      }
      if (candidates.empty()) throw InfeasibleKError("k exceeds the number of distinct records");
      pick = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    }

    chosen.push_back(pick);
    out.push_back(Prototype::seed(data.record(pick), data.schema()));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], distance(data.record(i), out.back(), gamma));
    }
  }
  return out;
}

std::vector<Prototype> init_unchecked(const MixedDataset& data, const FitConfig& cfg,
                                      std::size_t restart_index, double gamma) {
  SplitRng rng(cfg.seed, restart_index);
  switch (cfg.init) {
    case InitMethod::RandomRecords:
      return init_random_records(data, cfg.k, rng);
    case InitMethod::PlusPlus:
      break;
  }
  return init_plus_plus(data, cfg.k, gamma, rng);
}

void check_feasible(const MixedDataset& data, std::size_t k) {
  if (k > data.size()) {
    throw InfeasibleKError("k = " + std::to_string(k) + " exceeds the number of records (" +
                           std::to_string(data.size()) + ")");
  }
  const std::size_t distinct = data.distinct_count();
  if (k > distinct) {
    throw InfeasibleKError("k = " + std::to_string(k) + " exceeds the number of distinct records (" +
                           std::to_string(distinct) + ")");
  }
}

const char* init_name(InitMethod m) {
  return m == InitMethod::PlusPlus ? "plusplus" : "random-records";
}

}  // namespace

std::vector<Prototype> init_prototypes(const MixedDataset& data, const FitConfig& cfg,
                                       std::size_t restart_index, double gamma) {
  cfg.validate();
  if (!(gamma >= 0.0)) throw ParameterError("gamma must be >= 0");
  check_feasible(data, cfg.k);
  return init_unchecked(data, cfg, restart_index, gamma);
}

Assignment assign(const MixedDataset& data, std::span<const Prototype> prototypes, double gamma) {
  if (prototypes.empty()) throw ParameterError("no prototypes to assign to");
  for (const auto& p : prototypes) {
    if (p.numeric_center.size() != data.numeric_count() ||
        p.categorical_mode.size() != data.categorical_count()) {
      throw DimensionError("prototype shape does not match the dataset schema");
    }
  }
  const std::size_t n = data.size();
  Assignment out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RecordView r = data.record(i);
    double best = std::numeric_limits<double>::infinity();
    ClusterIndex best_l = 0;
    for (std::size_t l = 0; l < prototypes.size(); ++l) {
      const double d = distance(r, prototypes[l], gamma);
      if (d < best) {
        best = d;
        best_l = static_cast<ClusterIndex>(l);
      }
    }
    out[i] = best_l;
  }
  return out;
}

UpdateResult update_prototypes(const MixedDataset& data, const Assignment& assignment, std::size_t k) {
  const std::size_t n = data.size();
  const std::size_t mr = data.numeric_count();
  const std::size_t mc = data.categorical_count();
  if (assignment.size() != n) throw DimensionError("assignment length does not match the dataset");

  UpdateResult out;
  out.prototypes.reserve(k);
  for (std::size_t l = 0; l < k; ++l) {
    Prototype p;
    p.numeric_center.assign(mr, 0.0);
    p.categorical_mode.assign(mc, 0);
    p.category_freq.resize(mc);
    for (std::size_t j = 0; j < mc; ++j) {
      p.category_freq[j].assign(data.schema().categorical()[j].dictionary.size(), 0);
    }
    p.unknown_count.assign(mc, 0);
    out.prototypes.push_back(std::move(p));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const ClusterIndex l = assignment[i];
    if (l >= k) throw ParameterError("assignment value " + std::to_string(l) + " outside 0..k-1");
    Prototype& p = out.prototypes[l];
    ++p.member_count;
    const RecordView r = data.record(i);
    for (std::size_t j = 0; j < mr; ++j) p.numeric_center[j] += r.numeric[j];
    for (std::size_t j = 0; j < mc; ++j) {
      const Code c = r.categorical[j];
      if (c == kUnknownCode) {
        ++p.unknown_count[j];
      } else {
        ++p.category_freq[j][static_cast<std::size_t>(c)];
      }
    }
  }

  for (std::size_t l = 0; l < k; ++l) {
    Prototype& p = out.prototypes[l];
    if (p.member_count == 0) {
      out.empty_clusters.push_back(static_cast<ClusterIndex>(l));
      continue;
    }
    const double count = static_cast<double>(p.member_count);
    for (double& v : p.numeric_center) v /= count;
    for (std::size_t j = 0; j < mc; ++j) {
      const auto& freq = p.category_freq[j];
      // max_element returns the first maximum, i.e. the smallest code.
      p.categorical_mode[j] = static_cast<Code>(std::max_element(freq.begin(), freq.end()) - freq.begin());
    }
  }
  return out;
}

CostReport total_cost(const MixedDataset& data, std::span<const Prototype> prototypes,
                      const Assignment& assignment, double gamma) {
  const std::size_t n = data.size();
  if (assignment.size() != n) throw DimensionError("assignment length does not match the dataset");
  const std::size_t k = prototypes.size();
  std::vector<double> numeric(k, 0.0);
  std::vector<std::size_t> mismatch(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const ClusterIndex l = assignment[i];
    if (l >= k) throw ParameterError("assignment value " + std::to_string(l) + " outside 0..k-1");
    const RecordView r = data.record(i);
    numeric[l] += detail::sqdist(r.numeric, prototypes[l].numeric_center);
    mismatch[l] += detail::mismatches(r.categorical, prototypes[l].categorical_mode);
  }
  CostReport out;
  out.breakdowns.reserve(k);
  for (std::size_t l = 0; l < k; ++l) {
    out.breakdowns.push_back(ClusterCostBreakdown::make(numeric[l], gamma * static_cast<double>(mismatch[l])));
    out.total += out.breakdowns.back().total;
  }
  return out;
}

std::optional<std::size_t> farthest_record(const MixedDataset& data, std::span<const Prototype> prototypes,
                                           const Assignment& assignment, double gamma) {
  std::vector<std::size_t> counts(prototypes.size(), 0);
  for (ClusterIndex l : assignment) ++counts[l];
  std::optional<std::size_t> best;
  double best_d = -1.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const ClusterIndex l = assignment[i];
    if (counts[l] < 2) continue;
    const double d = distance(data.record(i), prototypes[l], gamma);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

// Update step followed by ReseedFarthest until no cluster is empty.
std::pair<std::vector<Prototype>, bool> update_and_reseed(const MixedDataset& data, Assignment& assignment,
                                                          std::size_t k, double gamma) {
  UpdateResult upd = update_prototypes(data, assignment, k);
  bool reseeded = false;
  while (!upd.empty_clusters.empty()) {
    const ClusterIndex empty = upd.empty_clusters.front();
    const auto victim = farthest_record(data, upd.prototypes, assignment, gamma);
    if (!victim) throw InfeasibleKError("cannot reseed an empty cluster");
    assignment[*victim] = empty;
    upd = update_prototypes(data, assignment, k);
    reseeded = true;
  }
  return {std::move(upd.prototypes), reseeded};
}

}  // namespace

RestartResult run_restart(const MixedDataset& data, std::vector<Prototype> seeds, double gamma,
                          const FitConfig& cfg, std::size_t restart_index, const FitObserver& observer) {
  cfg.validate();
  if (!(gamma >= 0.0)) throw ParameterError("gamma must be >= 0");
  const std::size_t k = seeds.size();
  if (k == 0) throw ParameterError("no seed prototypes");
  if (k > data.size()) throw InfeasibleKError("more seeds than records");

  auto emit = [&](std::size_t iteration, FitPhase phase, const CostReport& cost, const Assignment& a,
                  std::span<const Prototype> protos) {
    if (observer) observer(FitEvent{restart_index, iteration, phase, cost.total, &a, protos});
  };

  RestartResult out;
  out.prototypes = std::move(seeds);
  out.assignment = assign(data, out.prototypes, gamma);
  out.cost = total_cost(data, out.prototypes, out.assignment, gamma);
  emit(0, FitPhase::Initial, out.cost, out.assignment, out.prototypes);

  double previous = out.cost.total;
  bool consistent = false;  // prototypes are the means/modes of the assignment
  while (out.iterations < cfg.max_iter) {
    ++out.iterations;
    auto [protos, reseeded] = update_and_reseed(data, out.assignment, k, gamma);
    out.prototypes = std::move(protos);
    out.cost = total_cost(data, out.prototypes, out.assignment, gamma);
    emit(out.iterations, reseeded ? FitPhase::Reseed : FitPhase::Update, out.cost, out.assignment,
         out.prototypes);

    Assignment next = assign(data, out.prototypes, gamma);
    if (next == out.assignment) {
      out.converged = true;
      consistent = true;
      emit(out.iterations, FitPhase::Assign, out.cost, out.assignment, out.prototypes);
      break;
    }
    out.assignment = std::move(next);
    out.cost = total_cost(data, out.prototypes, out.assignment, gamma);
    emit(out.iterations, FitPhase::Assign, out.cost, out.assignment, out.prototypes);

    const double improvement = previous - out.cost.total;
    const bool stalled =
        previous > kAbsoluteTol ? improvement < cfg.tol * previous : improvement < kAbsoluteTol;
    previous = out.cost.total;
    if (stalled) break;
  }

  if (!consistent) {
    // Leave the returned prototypes consistent with the returned assignment.
    auto [protos, reseeded] = update_and_reseed(data, out.assignment, k, gamma);
    out.prototypes = std::move(protos);
    out.cost = total_cost(data, out.prototypes, out.assignment, gamma);
    emit(out.iterations, reseeded ? FitPhase::Reseed : FitPhase::Update, out.cost, out.assignment,
         out.prototypes);
  }
  return out;
}

ClusterModel fit_with_seeds(const MixedDataset& data, const FitConfig& cfg,
                            std::span<const std::vector<Prototype>> extra_seeds, const FitObserver& observer) {
  cfg.validate();
  check_feasible(data, cfg.k);
  const GammaEstimate gamma = resolve_gamma(data, cfg);

  ClusterModel model;
  model.schema = data.schema();
  model.k = cfg.k;
  model.gamma = gamma.value;
  model.fit_meta.seed = cfg.seed;
  model.fit_meta.restarts = cfg.restarts + extra_seeds.size();
  model.fit_meta.init = init_name(cfg.init);
  model.fit_meta.gamma_source = gamma.source;
  model.fit_meta.gamma_warning = gamma.numeric_degenerate;

  std::optional<RestartResult> best;
  auto consider = [&](RestartResult result, std::size_t restart) {
    model.fit_meta.iterations.push_back(result.iterations);
    model.fit_meta.restart_converged.push_back(result.converged);
    if (!best || result.cost.total < best->cost.total) {
      best = std::move(result);
      model.fit_meta.best_restart = restart;
    }
  };

  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    consider(run_restart(data, init_unchecked(data, cfg, r, gamma.value), gamma.value, cfg, r, observer), r);
  }
  for (std::size_t e = 0; e < extra_seeds.size(); ++e) {
    const std::size_t r = cfg.restarts + e;
    if (extra_seeds[e].size() != cfg.k) throw ParameterError("seed set size differs from k");
    consider(run_restart(data, extra_seeds[e], gamma.value, cfg, r, observer), r);
  }

  model.prototypes = std::move(best->prototypes);
  model.assignment = std::move(best->assignment);
  model.total_cost = best->cost.total;
  model.breakdowns = std::move(best->cost.breakdowns);
  model.fit_meta.converged = best->converged;
  return model;
}

ClusterModel fit(const MixedDataset& data, const FitConfig& cfg, const FitObserver& observer) {
  return fit_with_seeds(data, cfg, {}, observer);
}

ClusterIndex predict(const ClusterModel& model, RecordView record, UnknownPolicy policy) {
  const auto& schema = model.schema;
  if (record.numeric.size() != schema.numeric_count() ||
      record.categorical.size() != schema.categorical_count()) {
    throw DimensionError("record shape does not match the model schema");
  }
  for (std::size_t j = 0; j < record.categorical.size(); ++j) {
    const Code c = record.categorical[j];
    if (!schema.valid_code(j, c)) {
      throw SchemaError("invalid code for attribute '" + schema.categorical()[j].name + "'");
    }
    if (c == kUnknownCode && policy == UnknownPolicy::Strict) {
      throw UnknownCategoryError("unseen category for attribute '" + schema.categorical()[j].name + "'");
    }
  }
  for (double v : record.numeric) {
    if (!std::isfinite(v)) throw SchemaError("non-finite numeric value");
  }
  if (model.prototypes.empty()) throw ParameterError("model has no prototypes");
  double best = std::numeric_limits<double>::infinity();
  ClusterIndex best_l = 0;
  for (std::size_t l = 0; l < model.prototypes.size(); ++l) {
    const double d = distance(record, model.prototypes[l], model.gamma);
    if (d < best) {
      best = d;
      best_l = static_cast<ClusterIndex>(l);
    }
  }
  return best_l;
}

}  // namespace protoseg
