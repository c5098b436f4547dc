#include "mlpark/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <thread>

#include "mlpark/errors.hpp"

namespace mlpark {

namespace {

constexpr std::uint64_t kChunk = 256;

void fill_fixed_time(SiteIndex n_sites, double t, Xoshiro256pp& rng, ArrivalSequence& out) {
  out.clear();
  for (SiteIndex x = 0; x < n_sites; ++x) {
    const std::uint64_t count = sample_poisson(rng, t);
    out.insert(out.end(), count, x);
  }
  // Fisher-Yates: given the counts every interleaving is equally likely.
  for (std::size_t i = out.size(); i > 1; --i) {
    std::swap(out[i - 1], out[uniform_below(rng, i)]);
  }
}

void fill_fixed_count(SiteIndex n_sites, std::uint64_t arrivals, Xoshiro256pp& rng,
                      ArrivalSequence& out) {
  out.resize(arrivals);
  for (auto& x : out) x = static_cast<SiteIndex>(uniform_below(rng, n_sites));
}

struct Partial {
  std::vector<std::uint64_t> occupied;
  RaiseStats raises;
  std::vector<std::uint64_t> heights;
  std::uint64_t height_checks = 0;
  std::uint64_t height_violations = 0;

  void merge(const Partial& other) {
    for (std::size_t i = 0; i < occupied.size(); ++i) occupied[i] += other.occupied[i];
    raises.raised += other.raises.raised;
    raises.total += other.raises.total;
    raises.replications += other.raises.replications;
    raises.sum_abs_side_difference += other.raises.sum_abs_side_difference;
    if (heights.size() < other.heights.size()) heights.resize(other.heights.size(), 0);
    for (std::size_t i = 0; i < other.heights.size(); ++i) heights[i] += other.heights[i];
    height_checks += other.height_checks;
    height_violations += other.height_violations;
  }
};

class Worker {
 public:
  Worker(const RunConfig& config, const std::vector<SiteIndex>& sites)
      : config_(config), sites_(sites), state_(LatticeConfig{config.n_sites}) {
    partial_.occupied.assign(sites.size() * config.max_layer, 0);
  }

  void replicate(std::uint64_t index) {
    Xoshiro256pp rng = replication_stream(config_.seed, index);
    if (const auto* ft = std::get_if<FixedTime>(&config_.mode)) {
      fill_fixed_time(config_.n_sites, ft->t, rng, arrivals_);
    } else {
      fill_fixed_count(config_.n_sites, std::get<FixedArrivals>(config_.mode).arrivals, rng,
                       arrivals_);
    }

    state_.reset();
    if (config_.track_raises) {
      std::uint64_t raised = 0;
      for (SiteIndex x : arrivals_) {
        const LayerIndex before = state_.top_layer();
        if (state_.deposit(x) > before) ++raised;
      }
      partial_.raises.raised += raised;
      partial_.raises.total += arrivals_.size();
      ++partial_.raises.replications;
      const auto left = state_.arrivals(0);
      const auto right = state_.arrivals(config_.n_sites - 1);
      partial_.raises.sum_abs_side_difference += left > right ? left - right : right - left;
    } else {
      for (SiteIndex x : arrivals_) state_.deposit(x);
    }
#ifndef NDEBUG
    state_.check_invariants();
#endif

    const LayerIndex depth = config_.max_layer;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const auto column = state_.column_words(sites_[i]);
      std::uint64_t* row = partial_.occupied.data() + i * depth;
      for (LayerIndex r = 0; r < depth; ++r) {
        const std::size_t w = r / 64;
        if (w < column.size()) row[r] += (column[w] >> (r % 64)) & 1u;
      }
    }

    if (config_.n_sites == 3) {
      const std::uint64_t h = height_center(state_);
      ++partial_.height_checks;
      if (h != height_from_counts(state_)) ++partial_.height_violations;
      if (partial_.heights.size() <= h) partial_.heights.resize(h + 1, 0);
      ++partial_.heights[h];
    }
  }

  Partial& partial() { return partial_; }

 private:
  const RunConfig& config_;
  const std::vector<SiteIndex>& sites_;
  LatticeState state_;
  ArrivalSequence arrivals_;
  Partial partial_;
};

}  // namespace

void RunConfig::validate() const {
  if (n_sites == 0) throw InputError("sites: must be at least 1");
  if (replications == 0) throw InputError("reps: must be at least 1");
  if (max_layer == 0) throw InputError("layers: must be at least 1");
  if (const auto* ft = std::get_if<FixedTime>(&mode)) {
    if (!(ft->t >= 0.0) || !std::isfinite(ft->t)) {
      throw InputError("time: must be finite and non-negative");
    }
  } else if (std::get<FixedArrivals>(mode).arrivals == 0) {
    throw InputError("arrivals: must be at least 1");
  }
  for (SiteIndex s : observe_sites) {
    if (s >= n_sites) {
      throw InputError(fmt::format("observe: site {} outside [0, {})", s, n_sites));
    }
  }
}

std::vector<SiteIndex> RunConfig::resolved_observe_sites() const {
  if (observe_sites.empty()) return center_sites(n_sites);
  std::vector<SiteIndex> sites = observe_sites;
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

std::vector<SiteIndex> center_sites(SiteIndex n_sites) {
  if (n_sites == 0) throw InputError("n_sites must be at least 1");
  if (n_sites % 2 == 1) return {n_sites / 2};
  return {n_sites / 2 - 1, n_sites / 2};
}

std::uint64_t recommended_arrivals(SiteIndex n_sites, LayerIndex max_layer) {
  return std::max<std::uint64_t>(600, 20ULL * n_sites * max_layer);
}

const DensityEstimate& RunResult::at(SiteIndex site, LayerIndex layer) const {
  for (const auto& e : estimates) {
    if (e.site == site && e.layer == layer) return e;
  }
  throw InputError(fmt::format("no estimate for site {} layer {}", site, layer));
}

ArrivalSequence sample_arrivals_fixed_time(SiteIndex n_sites, double t, Xoshiro256pp& rng) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and non-negative");
  ArrivalSequence out;
  fill_fixed_time(n_sites, t, rng, out);
  return out;
}

ArrivalSequence sample_arrivals_fixed_count(SiteIndex n_sites, std::uint64_t arrivals,
                                            Xoshiro256pp& rng) {
  if (n_sites == 0) throw InputError("n_sites must be at least 1");
  ArrivalSequence out;
  fill_fixed_count(n_sites, arrivals, rng, out);
  return out;
}

RunResult run(const RunConfig& config) {
  config.validate();
  if (config.track_raises && config.n_sites != 3) {
    throw UnsupportedConfiguration("raise tracking is defined only for the three-site system");
  }
  const std::vector<SiteIndex> sites = config.resolved_observe_sites();

  const std::uint64_t chunks = (config.replications + kChunk - 1) / kChunk;
  unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, chunks));

  std::vector<Worker> workers;
  workers.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) workers.emplace_back(config, sites);

  std::atomic<std::uint64_t> next_chunk{0};
  auto drain = [&](Worker& worker) {
    for (;;) {
      const std::uint64_t c = next_chunk.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      const std::uint64_t end = std::min(config.replications, (c + 1) * kChunk);
      for (std::uint64_t rep = c * kChunk; rep < end; ++rep) worker.replicate(rep);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(drain, std::ref(workers[i]));
    drain(workers[0]);
  }

  // Integer sums: the reduction order cannot change the result.
  Partial total = std::move(workers[0].partial());
  for (unsigned i = 1; i < threads; ++i) total.merge(workers[i].partial());

  RunResult result;
  result.config = config;
  const double reps = static_cast<double>(config.replications);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (LayerIndex r = 1; r <= config.max_layer; ++r) {
      DensityEstimate e;
      e.site = sites[i];
      e.layer = r;
      e.occupied = total.occupied[i * config.max_layer + (r - 1)];
      e.replications = config.replications;
      e.mean = static_cast<double>(e.occupied) / reps;
      e.standard_error = std::sqrt(e.mean * (1.0 - e.mean) / reps);
      result.estimates.push_back(e);
    }
  }
  if (config.track_raises) result.raises = total.raises;
  result.height_histogram = std::move(total.heights);
  result.height_checks = total.height_checks;
  result.height_violations = total.height_violations;

  if (const auto* fa = std::get_if<FixedArrivals>(&config.mode)) {
    const std::uint64_t wanted = 20ULL * config.n_sites * config.max_layer;
    if (fa->arrivals < wanted) {
      result.warnings.push_back(fmt::format(
          "arrival budget {} is below 20*n*R = {}; estimates near layer {} may not have "
          "reached their end-density",
          fa->arrivals, wanted, config.max_layer));
    }
  }
  return result;
}

RaiseStats raise_fraction(RunConfig config) {
  if (config.n_sites != 3) {
    throw UnsupportedConfiguration("raise_fraction requires the three-site system");
  }
  if (!std::holds_alternative<FixedArrivals>(config.mode)) {
    throw UnsupportedConfiguration("raise_fraction requires fixed-arrivals mode");
  }
  config.track_raises = true;
  return *run(config).raises;
}

std::vector<double> center_profile(const RunResult& result) {
  const auto centers = center_sites(result.config.n_sites);
  std::vector<double> profile(result.config.max_layer, 0.0);
  for (LayerIndex r = 1; r <= result.config.max_layer; ++r) {
    double sum = 0.0;
    for (SiteIndex s : centers) sum += result.at(s, r).mean;
    profile[r - 1] = sum / static_cast<double>(centers.size());
  }
  return profile;
}

}  // namespace mlpark
