#include "ltvwc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ltvwc/extended_system.hpp"
#include "ltvwc/parallel.hpp"

namespace ltvwc {

LogSpace::LogSpace(const IqcStack& stack, const VectorXd& s_min, const VectorXd& s_max) {
  n_m_ = stack.nVars();
  if (s_min.size() != n_m_ || s_max.size() != n_m_)
    throw std::invalid_argument("exponent bounds must match variable count");
  sign_fixed_ = stack.signFixed();
  sign_slot_.assign(std::size_t(n_m_), -1);
  n_free_ = 0;
  for (Eigen::Index i = 0; i < n_m_; ++i)
    if (!sign_fixed_[std::size_t(i)]) sign_slot_[std::size_t(i)] = n_free_++;

  lo_.resize(dim());
  hi_.resize(dim());
  lo_.head(n_m_) = s_min;
  hi_.head(n_m_) = s_max;
  lo_.tail(n_free_).setConstant(-1.0);
  hi_.tail(n_free_).setConstant(1.0);
}

VectorXd LogSpace::decode(const VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("candidate dimension mismatch");
  VectorXd v(n_m_);
  for (Eigen::Index i = 0; i < n_m_; ++i) {
    double sign = 1.0;
    const Eigen::Index slot = sign_slot_[std::size_t(i)];
    if (slot >= 0 && x(n_m_ + slot) < 0.0) sign = -1.0;
    v(i) = sign * std::pow(10.0, x(i));
  }
  return v;
}

VectorXd LogSpace::encode(const VectorXd& values) const {
  if (values.size() != n_m_) throw std::invalid_argument("value vector dimension mismatch");
  VectorXd x = VectorXd::Zero(dim());
  for (Eigen::Index i = 0; i < n_m_; ++i) {
    const double v = values(i);
    if (v == 0.0) throw std::invalid_argument("zero has no logarithmic encoding");
    const Eigen::Index slot = sign_slot_[std::size_t(i)];
    if (v < 0.0 && slot < 0)
      throw std::invalid_argument("negative value for a sign-fixed variable");
    x(i) = std::log10(std::abs(v));
    if (slot >= 0) x(n_m_ + slot) = (v < 0.0) ? -1.0 : 1.0;
  }
  return x;
}

int population_schedule(const OptimizerConfig& cfg, int iteration) {
  if (cfg.literal_population_schedule) {
    const double r = double(cfg.n_p_max - cfg.n_p_min) /
                     (double(cfg.i_max) * double(cfg.n_p_max)) * double(iteration);
    return cfg.n_p_max - int(std::lround(r));
  }
  const double frac = std::min(1.0, double(iteration) / double(cfg.i_max));
  const int np = cfg.n_p_max - int(std::lround(double(cfg.n_p_max - cfg.n_p_min) * frac));
  return std::max(cfg.n_p_min, np);
}

void repair_bounds(VectorXd& child, const VectorXd& parent, const VectorXd& lo,
                   const VectorXd& hi) {
  for (Eigen::Index i = 0; i < child.size(); ++i) {
    if (child(i) < lo(i)) child(i) = 0.5 * (parent(i) + lo(i));
    else if (child(i) > hi(i)) child(i) = 0.5 * (parent(i) + hi(i));
  }
}

void SuccessMemory::update(const std::vector<double>& f, const std::vector<double>& cr,
                           const std::vector<double>& improvement) {
  if (f.empty()) return;
  double wsum = 0.0, f2 = 0.0, f1 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = improvement[i];
    wsum += w;
    f2 += w * f[i] * f[i];
    f1 += w * f[i];
    c1 += w * cr[i];
  }
  if (wsum <= 0.0 || f1 == 0.0) return;
  s_f[cursor % s_f.size()] = f2 / f1;          // weighted Lehmer mean
  s_cr[cursor % s_cr.size()] = c1 / wsum;      // weighted arithmetic mean
  ++cursor;
}

namespace {

struct Evaluator {
  const ExtendedSystem& ext;
  const OptimizerConfig& cfg;
  const LogSpace& space;
  IqcStack scaled;
  std::atomic<long> integrations{0};

  /// Parent-bounded fitness: infeasible X costs no integration; an RDE not
  /// solvable at the upper bound yields the sentinel without bisection.
  double evaluate(const VectorXd& x, double parent_fitness) {
    const VectorXd values = space.decode(x);
    if (!scaled.feasible(values)) return kInfeasibleGamma;
    const MatrixXd M = scaled.decode(values);

    BisectionConfig c = cfg.bisection;
    int evals = 0;
    if (parent_fitness < kInfeasibleGamma) {
      if (parent_fitness <= c.gamma_lb * (1.0 + c.eps_bs)) {
        // Parent already sits at the bisection floor: a single probe decides.
        const bool ok = rde_solvable(ext, M, parent_fitness, c, evals);
        integrations.fetch_add(evals);
        return ok ? parent_fitness : kInfeasibleGamma;
      }
      c.gamma_ub = parent_fitness;
      const GainResult r = bisect_gamma(ext, M, c);
      integrations.fetch_add(r.evaluations);
      return r.gamma;
    }
    // No parent bound: grow the upper bound by decades until solvable.
    double ub = c.gamma_ub;
    while (ub < kInfeasibleGamma && !rde_solvable(ext, M, ub, c, evals)) ub *= 10.0;
    if (ub >= kInfeasibleGamma) {
      integrations.fetch_add(evals);
      return kInfeasibleGamma;
    }
    c.gamma_ub = ub;
    const GainResult r = bisect_gamma(ext, M, c);
    integrations.fetch_add(evals + r.evaluations);
    return r.gamma;
  }
};

}  // namespace

OptimizerResult optimize(const OptimizerConfig& cfg, const TimeVaryingStateSpace& plant,
                         const IqcStack& stack) {
  OptimizerResult result;

  // Degenerate nominal problem: nothing to optimize.
  if (stack.empty() || stack.nVars() == 0) {
    ExtendedSystem ext = stack.empty() ? build_extended_nominal(plant)
                                       : build_extended(plant, stack);
    GainResult g = nominal_gamma(ext, cfg.bisection);
    result.gamma_best = g.gamma;
    result.rde_evaluations = g.evaluations;
    result.final_bound_scale = 1.0;
    result.gamma_trajectory = {g.gamma};
    return result;
  }

  ExtendedSystem ext = build_extended(plant, stack);
  LogSpace space(stack, cfg.s_min, cfg.s_max);
  Evaluator eval{ext, cfg, space, stack.rescaled(cfg.k_iqc)};

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index dim = space.dim();

  auto sample_candidate = [&]() {
    VectorXd x(dim);
    for (int tries = 0; tries < 1000; ++tries) {
      for (Eigen::Index i = 0; i < dim; ++i)
        x(i) = space.lower()(i) + unit(rng) * (space.upper()(i) - space.lower()(i));
      if (eval.scaled.feasible(space.decode(x))) break;
    }
    return x;
  };

  // ---- validity-gated initialization ----
  std::vector<LogCandidate> pop(std::size_t(cfg.n_p_max));
  for (std::size_t j = 0; j < pop.size(); ++j) {
    if (j < cfg.initial_guesses.size()) {
      if (cfg.initial_guesses[j].size() != dim)
        throw std::invalid_argument("initial guess dimension mismatch");
      pop[j].x = cfg.initial_guesses[j];
    } else {
      pop[j].x = sample_candidate();
    }
  }

  auto evaluate_fresh = [&](std::vector<int>& idx) {
    parallel_for(int(idx.size()), cfg.workers, [&](int k) {
      pop[std::size_t(idx[std::size_t(k)])].fitness =
          eval.evaluate(pop[std::size_t(idx[std::size_t(k)])].x, kInfeasibleGamma);
    });
  };

  std::vector<int> all(pop.size());
  std::iota(all.begin(), all.end(), 0);
  evaluate_fresh(all);

  const auto valid_count = [&]() {
    return std::count_if(pop.begin(), pop.end(),
                         [](const LogCandidate& c) { return c.fitness < kInfeasibleGamma; });
  };
  int rounds = 0;
  while (double(valid_count()) < cfg.min_valid_fraction * double(pop.size())) {
    if (++rounds > cfg.init_retry_rounds)
      throw std::runtime_error(
          "initialization failed to reach the required valid fraction; "
          "try a smaller k_iqc");
    std::vector<int> invalid;
    for (std::size_t j = 0; j < pop.size(); ++j)
      if (pop[j].fitness >= kInfeasibleGamma && j >= cfg.initial_guesses.size())
        invalid.push_back(int(j));
    for (int j : invalid) pop[std::size_t(j)].x = sample_candidate();
    evaluate_fresh(invalid);
  }

  double scale = cfg.k_iqc;
  int n_p_iqc = cfg.n_p_max;
  SuccessMemory memory(cfg.k_f, cfg.k_cr);
  std::vector<VectorXd> archive;

  auto best_index = [&]() {
    std::size_t b = 0;
    for (std::size_t j = 1; j < pop.size(); ++j)
      if (pop[j].fitness < pop[b].fitness) b = j;
    return b;
  };
  double gamma_best = pop[best_index()].fitness;

  std::ofstream progress;
  if (!cfg.progress_csv.empty()) {
    progress.open(cfg.progress_csv);
    progress << "iteration,n_p,gamma_best,bound_scale,rde_integrations\n";
  }
  auto log_progress = [&](int iter) {
    if (!progress.is_open()) return;
    progress.precision(12);
    progress << iter << "," << pop.size() << "," << gamma_best << "," << scale << ","
             << eval.integrations.load() << "\n";
  };
  log_progress(0);

  std::cauchy_distribution<double> cauchy_base(0.0, 0.1);
  std::normal_distribution<double> normal_base(0.0, std::sqrt(0.1));

  for (int iter = 1; iter <= cfg.i_max; ++iter) {
    result.iterations = iter;

    // ---- norm-bound rescaling ----
    if (scale < 1.0 &&
        (gamma_best < cfg.gamma_lim || double(pop.size()) < 0.8 * double(n_p_iqc))) {
      scale = std::min(1.0, 2.0 * scale);
      eval.scaled = stack.rescaled(scale);
      std::vector<int> idx(pop.size());
      std::iota(idx.begin(), idx.end(), 0);
      evaluate_fresh(idx);
      n_p_iqc = int(pop.size());
      gamma_best = pop[best_index()].fitness;
    }

    const int n_p = int(pop.size());

    // Fitness-sorted index list for pbest selection.
    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pop[std::size_t(a)].fitness < pop[std::size_t(b)].fitness;
    });
    const int n_best = std::max(1, int(std::ceil(cfg.pbest_fraction * double(n_p))));

    // ---- mutation + crossover (sequential draws, parallel evaluation) ----
    std::vector<VectorXd> children(pop.size());
    std::vector<double> child_fitness(pop.size());
    std::vector<double> used_f(pop.size()), used_cr(pop.size());
    for (int j = 0; j < n_p; ++j) {
      double F;
      do {
        const double loc = memory.s_f[std::size_t(rng() % memory.s_f.size())];
        F = loc + cauchy_base(rng);
      } while (F <= 0.0);
      F = std::min(F, 1.0);
      used_f[std::size_t(j)] = F;

      const int pbest = order[rng() % std::size_t(n_best)];
      int r1, r2;
      do { r1 = int(rng() % std::size_t(n_p)); } while (r1 == j);
      const std::size_t pool = std::size_t(n_p) + (cfg.use_archive ? archive.size() : 0);
      do { r2 = int(rng() % pool); } while (r2 == j || r2 == r1);
      const VectorXd& xr2 = (r2 < n_p) ? pop[std::size_t(r2)].x
                                       : archive[std::size_t(r2 - n_p)];

      const VectorXd& parent = pop[std::size_t(j)].x;
      VectorXd trial = parent + F * (pop[std::size_t(pbest)].x - parent +
                                     pop[std::size_t(r1)].x - xr2);

      const double cr_loc = memory.s_cr[std::size_t(rng() % memory.s_cr.size())];
      const double CR = std::clamp(cr_loc + normal_base(rng), 0.0, 1.0);
      used_cr[std::size_t(j)] = CR;
      const Eigen::Index jrand = Eigen::Index(rng() % std::uint64_t(dim));
      VectorXd child = parent;
      for (Eigen::Index i = 0; i < dim; ++i)
        if (i == jrand || unit(rng) < CR) child(i) = trial(i);
      repair_bounds(child, parent, space.lower(), space.upper());
      children[std::size_t(j)] = std::move(child);
    }

    parallel_for(n_p, cfg.workers, [&](int j) {
      child_fitness[std::size_t(j)] =
          eval.evaluate(children[std::size_t(j)], pop[std::size_t(j)].fitness);
    });

    // ---- selection + success memory ----
    std::vector<double> sf, scr, simp;
    for (int j = 0; j < n_p; ++j) {
      if (child_fitness[std::size_t(j)] < pop[std::size_t(j)].fitness) {
        sf.push_back(used_f[std::size_t(j)]);
        scr.push_back(used_cr[std::size_t(j)]);
        simp.push_back(pop[std::size_t(j)].fitness - child_fitness[std::size_t(j)]);
        if (cfg.use_archive) archive.push_back(pop[std::size_t(j)].x);
        pop[std::size_t(j)].x = children[std::size_t(j)];
        pop[std::size_t(j)].fitness = child_fitness[std::size_t(j)];
      }
    }
    memory.update(sf, scr, simp);
    while (cfg.use_archive && archive.size() > pop.size()) {
      archive.erase(archive.begin() + long(rng() % archive.size()));
    }

    // ---- linear population-size reduction ----
    const int n_target = population_schedule(cfg, iter);
    if (n_target < int(pop.size())) {
      std::vector<int> idx(pop.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return pop[std::size_t(a)].fitness < pop[std::size_t(b)].fitness;
      });
      std::vector<LogCandidate> next;
      next.reserve(std::size_t(n_target));
      for (int k = 0; k < n_target; ++k) next.push_back(pop[std::size_t(idx[std::size_t(k)])]);
      pop = std::move(next);
    }

    gamma_best = pop[best_index()].fitness;
    result.gamma_trajectory.push_back(gamma_best);
    log_progress(iter);

    if (gamma_best < cfg.gamma_lim && scale >= 1.0) break;
  }

  // A bound certified under downscaled norms is not a bound for the true
  // uncertainty set; force full scale before reporting.
  if (scale < 1.0) {
    scale = 1.0;
    eval.scaled = stack.rescaled(1.0);
    std::vector<int> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    evaluate_fresh(idx);
    gamma_best = pop[best_index()].fitness;
    result.gamma_trajectory.push_back(gamma_best);
  }

  const std::size_t b = best_index();
  result.gamma_best = pop[b].fitness;
  result.best = pop[b];
  result.values_best = space.decode(pop[b].x);
  result.rde_evaluations = eval.integrations.load();
  result.final_bound_scale = scale;
  return result;
}

}  // namespace ltvwc
