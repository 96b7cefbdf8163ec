#include "kpsupport/completion/protocol.hpp"

#include "kpsupport/completion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace kpsupport::completion {
namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kMaskStream = 2;
constexpr std::uint64_t kValidationStream = 3;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

SyntheticMatrix generate(const SyntheticProtocol& p, std::uint64_t seed) {
  switch (p.kind) {
    case SyntheticKind::flat: return generate_flat(p.d, p.m, p.r, p.noise(), seed);
    case SyntheticKind::decay: return generate_decay(p.d, p.m, p.r, p.a, seed, p.noise());
    case SyntheticKind::lowrank: return generate_lowrank(p.d, p.m, p.r, seed, p.noise());
  }
  throw std::logic_error("unknown synthetic kind");
}

/// Best successful cell with the given p by (validation metric, k, alpha).
const CellResult* best_with_p(const ExperimentResult& result, double p) {
  const CellResult* best = nullptr;
  for (const auto& c : result.cells) {
    if (!c.ok || c.p != p || std::isnan(c.val_metric)) continue;
    if (!best || std::tie(c.val_metric, c.k, c.alpha) < std::tie(best->val_metric, best->k, best->alpha))
      best = &c;
  }
  return best;
}

}  // namespace

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::flat: return "flat";
    case SyntheticKind::decay: return "decay";
    case SyntheticKind::lowrank: return "lowrank";
  }
  return "unknown";
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  for (auto kind : {SyntheticKind::flat, SyntheticKind::decay, SyntheticKind::lowrank})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown protocol '" + name + "' (expected flat, decay or lowrank)");
}

double default_noise(SyntheticKind kind) { return kind == SyntheticKind::lowrank ? 1.0 : 0.25; }

void SyntheticProtocol::validate() const {
  require(d >= 1 && m >= 1, "protocol: d and m must be positive");
  require(r >= 1 && r <= std::min(d, m), "protocol: rank must lie in [1, min(d, m)]");
  require(rho > 0 && rho < 1, "protocol: rho must lie in (0, 1)");
  require(validation_fraction > 0 && validation_fraction < 1,
          "protocol: validation fraction must lie in (0, 1)");
  require(trials >= 1, "protocol: trials must be >= 1");
  require(noise() >= 0 && std::isfinite(noise()), "protocol: noise must be finite and >= 0");
  require(std::isfinite(a) && a >= 0, "protocol: decay rate must be finite and >= 0");
  const double sample = std::floor(rho * double(d) * double(m));
  require(std::floor(validation_fraction * sample) >= 1,
          "protocol: the validation split would be empty");
  require(sample - std::floor(validation_fraction * sample) >= 1, "protocol: the training split would be empty");
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return derive_seed(seed, static_cast<std::uint64_t>(trial));
}

ProtocolRun run_synthetic(const SyntheticProtocol& protocol, const GridSpec& grid,
                          const GridConfig& config) {
  protocol.validate();
  (void)grid.normalized(std::min(protocol.d, protocol.m));

  ProtocolRun run;
  for (int t = 0; t < protocol.trials; ++t) {
    const std::uint64_t seed = trial_seed(protocol.seed, t);
    const SyntheticMatrix matrix = generate(protocol, derive_seed(seed, kDataStream));
    const Mask sample = sample_mask(protocol.d, protocol.m, MaskSpec::uniform(protocol.rho),
                                    derive_seed(seed, kMaskStream));
    const SampleSplit split =
        carve_validation(sample, protocol.validation_fraction, derive_seed(seed, kValidationStream));
    const CompletionData data{MaskedMatrix(matrix.observed, split.train),
                              MaskedMatrix(matrix.observed, split.validation),
                              MaskedMatrix(matrix.observed, !sample), Metric::relative_error, std::nullopt};
    TrialRecord record{t, seed, run_validation_grid(data, grid, config)};
    for (const auto& w : record.result.warnings)
      run.warnings.push_back("trial " + std::to_string(t) + ": " + w);
    run.trials.push_back(std::move(record));
  }
  return run;
}

void RealProtocol::validate() const {
  require(validation_fraction > 0 && validation_fraction < 1,
          "protocol: validation fraction must lie in (0, 1)");
  require(trials >= 1, "protocol: trials must be >= 1");
  if (sampling.kind == MaskSpec::Kind::per_row_count)
    require(sampling.count >= 1, "protocol: per-user count must be >= 1");
  else
    require(sampling.fraction > 0 && sampling.fraction < 1, "protocol: sampling fraction must lie in (0, 1)");
}

RealProtocol movielens_protocol() { return {}; }

RealProtocol jester_protocol(Index per_user) {
  RealProtocol p;
  p.sampling = MaskSpec::per_row(per_user);
  return p;
}

ProtocolRun run_real(const RatingsTable& table, const RealProtocol& protocol, const GridSpec& grid,
                     const GridConfig& config) {
  protocol.validate();
  ProtocolRun run;
  MaskedMatrix all = table.to_masked();

  if (protocol.sampling.kind == MaskSpec::Kind::per_row_count && !protocol.sanity) {
    std::vector<Index> kept;
    for (Index i = 0; i < all.rows(); ++i)
      if (all.mask().row(i).count() >= protocol.sampling.count) kept.push_back(i);
    const auto dropped = static_cast<std::size_t>(all.rows()) - kept.size();
    if (kept.empty())
      throw std::invalid_argument("protocol: no user has " + std::to_string(protocol.sampling.count) +
                                  " ratings");
    if (dropped > 0) {
      run.warnings.push_back(std::to_string(dropped) + " users with fewer than " +
                             std::to_string(protocol.sampling.count) + " ratings excluded");
      Mat values(Index(kept.size()), all.cols());
      Mask mask(Index(kept.size()), all.cols());
      for (std::size_t r = 0; r < kept.size(); ++r) {
        values.row(Index(r)) = all.values().row(kept[r]);
        mask.row(Index(r)) = all.mask().row(kept[r]);
      }
      all = MaskedMatrix(values, mask);
    }
  }
  (void)grid.normalized(std::min(all.rows(), all.cols()));

  for (int t = 0; t < protocol.trials; ++t) {
    const std::uint64_t seed = trial_seed(protocol.seed, t);
    CompletionData data{all, all, all, Metric::nmae, table.range};
    if (!protocol.sanity) {
      const Mask sample = sample_mask(all.rows(), all.cols(), protocol.sampling, derive_seed(seed, kMaskStream),
                                      all.mask());
      const SampleSplit split =
          carve_validation(sample, protocol.validation_fraction, derive_seed(seed, kValidationStream));
      data.train = MaskedMatrix(all.values(), split.train);
      data.validation = MaskedMatrix(all.values(), split.validation);
      data.test = MaskedMatrix(all.values(), all.mask() && !sample);
    }
    TrialRecord record{t, seed, run_validation_grid(data, grid, config)};
    for (const auto& w : record.result.warnings)
      run.warnings.push_back("trial " + std::to_string(t) + ": " + w);
    run.trials.push_back(std::move(record));
  }
  return run;
}

std::vector<MethodSummary> summarize(const ProtocolRun& run) {
  std::vector<MethodSummary> out;
  for (Method method : {Method::trace, Method::ksupport, Method::kpsupport}) {
    MethodSummary s;
    s.method = method;
    std::vector<double> val, ks, ps;
    for (const auto& trial : run.trials) {
      const auto best = trial.result.select(method);
      if (!best) continue;
      const auto& c = trial.result.cells[*best];
      val.push_back(c.val_metric);
      s.test.push_back(c.test_metric);
      ks.push_back(double(c.k));
      ps.push_back(c.p);
    }
    s.trials = s.test.size();
    if (s.trials > 0) {
      s.mean_val = mean(val);
      s.mean_test = mean(s.test);
      s.std_test = sample_std(s.test);
      s.mean_k = mean(ks);
      s.mean_p = mean(ps);
    } else {
      s.mean_val = s.mean_test = s.std_test = s.mean_k = s.mean_p = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(s));
  }
  return out;
}

double CurveByP::optimal_p() const {
  std::size_t best = ps.size();
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (!std::isnan(mean_val[i]) && (best == ps.size() || mean_val[i] < mean_val[best])) best = i;
  if (best == ps.size()) throw std::runtime_error("optimal_p: no successful cells");
  return ps[best];
}

CurveByP curve_by_p(const ProtocolRun& run) {
  CurveByP curve;
  for (const auto& trial : run.trials)
    for (const auto& c : trial.result.cells) curve.ps.push_back(c.p);
  std::sort(curve.ps.begin(), curve.ps.end());
  curve.ps.erase(std::unique(curve.ps.begin(), curve.ps.end()), curve.ps.end());
  for (double p : curve.ps) {
    std::vector<double> val, test;
    for (const auto& trial : run.trials) {
      if (const CellResult* c = best_with_p(trial.result, p)) {
        val.push_back(c->val_metric);
        test.push_back(c->test_metric);
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    curve.mean_val.push_back(val.empty() ? nan : mean(val));
    curve.mean_test.push_back(test.empty() ? nan : mean(test));
  }
  return curve;
}

DecaySweep run_decay_sweep(const SyntheticProtocol& base, const std::vector<double>& decays,
                           const GridSpec& grid, const GridConfig& config) {
  require(decays.size() >= 2, "decay sweep: need at least two decay rates");
  SyntheticProtocol protocol = base;
  protocol.kind = SyntheticKind::decay;
  for (double a : decays) {
    protocol.a = a;
    protocol.validate();
  }
  DecaySweep sweep;
  std::vector<double> as(decays.begin(), decays.end());
  std::sort(as.begin(), as.end());
  // Every decay rate reuses the same trial seeds.
  for (double a : as) {
    protocol.a = a;
    DecayPoint point;
    point.a = a;
    point.curve = curve_by_p(run_synthetic(protocol, grid, config));
    point.optimal_p = point.curve.optimal_p();
    sweep.points.push_back(std::move(point));
  }
  std::vector<double> optimal;
  for (const auto& point : sweep.points) optimal.push_back(point.optimal_p);
  sweep.spearman = spearman(as, optimal);
  for (std::size_t i = 1; i < optimal.size(); ++i)
    if (optimal[i] > optimal[i - 1]) ++sweep.inversions;
  return sweep;
}

}  // namespace kpsupport::completion
