#include "sparsesr/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sparsesr/parallel.hpp"

namespace sparsesr {

void SolverConfig::validate() const {
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error("shrink factor must lie in (0, 1)");
  if (!(grad_tol > 0.0)) throw Error("grad_tol must be positive");
  if (!(decrement_tol >= 0.0)) throw Error("decrement_tol must be nonnegative");
  if (!(initial_step > 0.0)) throw Error("initial step must be positive");
  if (!(sufficient_decrease >= 0.0 && sufficient_decrease < 1.0)) {
    throw Error("sufficient-decrease constant must lie in [0, 1)");
  }
  if (!(min_step > 0.0)) throw Error("min_step must be positive");
  if (!(w >= 1.0) || !std::isfinite(w)) throw Error("penalty weight must be >= 1");
  if (max_iters < 0) throw Error("max_iters must be nonnegative");
  if (!(jitter_scale > 0.0)) throw Error("jitter_scale must be positive");
  if (max_jitter < 0) throw Error("max_jitter must be nonnegative");
  if (collapse_iters < 1) throw Error("collapse_iters must be at least 1");
  if (multistart_count < 1) throw Error("multistart_count must be at least 1");
  if (!(alpha_tol > 0.0)) throw Error("alpha_tol must be positive");
  if (!(continuation_factor > 1.0)) throw Error("continuation_factor must exceed 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gradient_tolerance: return "gradient_tolerance";
    case Termination::decrement_tolerance: return "decrement_tolerance";
    case Termination::line_search_stalled: return "line_search_stalled";
    case Termination::max_iterations: return "max_iterations";
    case Termination::omega_collapsed: return "omega_collapsed";
  }
  return "unknown";
}

std::string to_string(DescentMode m) { return m == DescentMode::newton ? "newton" : "gradient"; }

std::string to_string(StepRule r) {
  return r == StepRule::armijo ? "armijo" : "backtracking";
}

DescentMode parse_descent_mode(const std::string& s) {
  if (s == "newton") return DescentMode::newton;
  if (s == "gradient") return DescentMode::gradient;
  throw Error("unknown descent mode '" + s + "'");
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "backtracking") return StepRule::backtracking;
  if (s == "armijo") return StepRule::armijo;
  throw Error("unknown step rule '" + s + "'");
}

namespace {

constexpr double kStallDecrementTol = 1e-10;
constexpr int kMaxExpansions = 30;
/// Accepted steps whose decrease is within roundoff of the cost count as no
/// progress; this many in a row end the descent as a stall.
constexpr int kMaxIdleSteps = 3;

struct Evaluated {
  SearchPoint pt;
  double cost;
};

std::optional<Evaluated> try_evaluate(const ProblemInstance& inst, const RealVector& z,
                                      int columns, const WeightMatrix& weights) {
  if (!z.allFinite()) return std::nullopt;
  try {
    SearchPoint pt = evaluate_packed(inst, z, columns, weights);
    if (ill_conditioned(pt)) return std::nullopt;
    const double c = cost(pt, weights);
    if (!std::isfinite(c)) return std::nullopt;
    return Evaluated{std::move(pt), c};
  } catch (const StabilityAssumptionError&) {
    return std::nullopt;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

/// Cost and Delta are invariant under G -> c G (and G -> G R for rotations R
/// commuting with Ibar), so g is kept at unit norm.
void normalize_g(RealVector& z, Eigen::Index glen) {
  const double nrm = z.head(glen).norm();
  if (nrm > 0.0 && std::isfinite(nrm)) z.head(glen) /= nrm;
}

struct Stage {
  RealVector z;
  std::optional<Evaluated> current;
  double grad_norm = 0.0;
  Termination termination = Termination::max_iterations;
  bool converged = false;
  int iterations = 0;
  int jitters = 0;
  double stall_decrement = 0.0;
  std::vector<IterationRecord> trace;
};

Stage descend(const ProblemInstance& inst, const SolverConfig& cfg, RealVector z, int columns,
              double w, bool record, std::mt19937_64& rng) {
  const WeightMatrix weights(inst.pattern(), w);
  const Eigen::Index glen = columns * inst.m();
  Stage st;

  normalize_g(z, glen);
  st.current = try_evaluate(inst, z, columns, weights);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  while (!st.current && st.jitters < cfg.max_jitter) {
    const double mag = cfg.jitter_scale * (1.0 + z.head(glen).norm());
    for (Eigen::Index i = 0; i < glen; ++i) z(i) += mag * unif(rng);
    ++st.jitters;
    st.current = try_evaluate(inst, z, columns, weights);
  }
  if (!st.current) {
    throw RankAssumptionError("CX stays rank deficient after " + std::to_string(st.jitters) +
                              " jitter attempts");
  }

  int idle = 0;
  int collapsed = 0;
  for (int iter = 0;; ++iter) {
    const SearchPoint& pt = st.current->pt;
    const double j = st.current->cost;
    const GradientWorkspace ws = build_workspace(inst, pt, weights);
    const RealVector grad = gradient(ws, pt, weights);
    st.grad_norm = grad.norm();
    if (!std::isfinite(st.grad_norm)) {
      throw SolveFailure("gradient is not finite at iteration " + std::to_string(iter), st.trace);
    }

    IterationRecord rec{.iter = iter,
                        .cost = j,
                        .grad_norm = st.grad_norm,
                        .omega = pt.omega,
                        .alpha = matops::spectral_abscissa(perturbed_matrix(inst, pt.delta)),
                        .beta = 0.0,
                        .delta_fnorm = pt.delta.norm()};
    auto finish = [&](Termination t, bool ok) {
      st.termination = t;
      st.converged = ok;
      st.iterations = iter;
      st.z = z;
      if (record) st.trace.push_back(rec);
    };

    const double scale = 1.0 + std::abs(j);
    if (st.grad_norm <= cfg.grad_tol * scale) {
      finish(Termination::gradient_tolerance, true);
      return st;
    }
    RealMatrix hreg = gauss_newton(ws, weights);
    hreg.diagonal().array() += cfg.eps;
    const Eigen::LDLT<RealMatrix> ldlt(hreg);
    const RealVector newton_dir = ldlt.solve(grad);
    const double decrement = grad.dot(newton_dir);
    if (std::isfinite(decrement) && decrement <= cfg.decrement_tol * scale) {
      finish(Termination::decrement_tolerance, true);
      return st;
    }
    if (iter >= cfg.max_iters) {
      finish(Termination::max_iterations, false);
      return st;
    }
    collapsed = columns == 2 && std::abs(pt.omega) < cfg.omega_zero_threshold ? collapsed + 1 : 0;
    if (collapsed >= cfg.collapse_iters) {
      finish(Termination::omega_collapsed, false);
      return st;
    }

    RealVector dir = cfg.mode == DescentMode::newton ? newton_dir : grad;
    if (cfg.mode == DescentMode::newton && cfg.exact_hessian) {
      RealMatrix h = hessian(ws, inst, pt, weights).full();
      h.diagonal().array() += cfg.eps;
      const Eigen::LLT<RealMatrix> llt(h);
      if (llt.info() == Eigen::Success) dir = llt.solve(grad);
    }
    const double slope = grad.dot(dir);

    auto trial = [&](double beta) {
      RealVector zt = z - beta * dir;
      normalize_g(zt, glen);
      auto ev = try_evaluate(inst, zt, columns, weights);
      return std::make_pair(std::move(zt), std::move(ev));
    };
    auto sufficient = [&](double beta, const std::optional<Evaluated>& ev) {
      return ev && ev->cost <= j - cfg.sufficient_decrease * beta * slope;
    };

    double beta = cfg.initial_step;
    auto [zt, ev] = trial(beta);
    bool accepted = false;
    if (sufficient(beta, ev)) {
      accepted = true;
      if (cfg.step_rule == StepRule::armijo) {
        for (int e = 0; e < kMaxExpansions; ++e) {
          const double bigger = beta / cfg.shrink;
          auto [zb, evb] = trial(bigger);
          if (!sufficient(bigger, evb) || evb->cost >= ev->cost) break;
          beta = bigger;
          zt = std::move(zb);
          ev = std::move(evb);
        }
      }
    } else {
      while (beta >= cfg.min_step) {
        beta *= cfg.shrink;
        std::tie(zt, ev) = trial(beta);
        if (sufficient(beta, ev)) {
          accepted = true;
          break;
        }
      }
    }

    if (accepted && j - ev->cost <= 16.0 * std::numeric_limits<double>::epsilon() * scale) {
      accepted = ++idle < kMaxIdleSteps;
    } else {
      idle = 0;
    }
    if (!accepted) {
      st.stall_decrement = decrement / scale;
      finish(Termination::line_search_stalled, decrement <= kStallDecrementTol * scale);
      return st;
    }
    rec.beta = beta;
    if (record) st.trace.push_back(rec);
    z = std::move(zt);
    st.current = std::move(ev);
  }
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

SolveResult finalize(const ProblemInstance& inst, const SolverConfig& cfg, Stage& main,
                     Stage& last, double final_w) {
  SolveResult r;
  SearchPoint pt = last.current->pt;
  r.columns = pt.columns;
  r.final_weight = final_w;
  r.cost = last.current->cost;
  r.grad_norm = last.grad_norm;
  r.converged = main.converged;
  r.termination = main.termination;
  r.iterations = main.iterations;
  r.jitters = main.jitters + (&last == &main ? 0 : last.jitters);
  r.trace = std::move(main.trace);

  r.delta = pt.delta;
  r.x = pt.x;
  r.g = pt.g;
  r.omega = pt.omega;
  const Eigen::Index m = inst.m();
  if (r.columns == 2 && r.omega < 0.0) {
    r.omega = -r.omega;
    r.x.col(1) = -r.x.col(1);
    r.g.tail(m) = -r.g.tail(m);
  }
  if (r.columns == 2) {
    r.eigvec = r.x.col(0).cast<Complex>() + Complex(0.0, 1.0) * r.x.col(1).cast<Complex>();
  } else {
    r.eigvec = r.x.col(0).cast<Complex>();
  }
  const double xn = r.eigvec.norm();
  if (xn > 0.0) r.eigvec /= xn;

  const RealMatrix ad = perturbed_matrix(inst, r.delta);
  const Complex jw(0.0, r.omega);
  r.eig_residual = (ad.cast<Complex>() * r.eigvec - jw * r.eigvec).norm();
  r.fnorm = r.delta.norm();
  const SparseProjection sp = project_sparse(r.delta, inst.pattern());
  r.delta_sparse = sp.projected;
  r.sparsity_error = sp.error;
  r.fnorm_sparse = r.delta_sparse.norm();
  r.alpha = matops::spectral_abscissa(ad);
  const ComplexVector spec_sparse = matops::spectrum(perturbed_matrix(inst, r.delta_sparse));
  r.alpha_sparse = spec_sparse.real().maxCoeff();
  r.boundary_distance = (spec_sparse.array() - jw).abs().minCoeff();

  r.raw_valid = std::abs(r.alpha) <= cfg.alpha_tol;
  r.sparse_stationary = r.boundary_distance <= cfg.boundary_tol * (1.0 + r.omega);
  r.valid_local_min = r.converged && r.raw_valid && r.sparse_stationary &&
                      std::abs(r.alpha_sparse) <= cfg.alpha_tol;
  return r;
}

SolveResult run(const ProblemInstance& inst, const SolverConfig& cfg, RealVector z, int columns) {
  cfg.validate();
  const StabilityCheck a1 = check_a1(inst);
  if (!a1.pass) {
    throw StabilityAssumptionError("A is not Hurwitz stable (spectral abscissa " +
                                   std::to_string(a1.abscissa) + ")");
  }
  auto rng = make_rng(cfg.seed, 0x5eed);
  Stage main = descend(inst, cfg, std::move(z), columns, cfg.w, true, rng);
  Stage* last = &main;
  Stage cont;
  double final_w = cfg.w;

  if (main.converged && !inst.pattern().fully_free() && cfg.continuation_max_w > cfg.w) {
    double w = cfg.w;
    while (w < cfg.continuation_max_w) {
      w = std::min(w * cfg.continuation_factor, cfg.continuation_max_w);
      Stage next;
      try {
        next = descend(inst, cfg, last->z, columns, w, false, rng);
      } catch (const Error&) {
        break;
      }
      if (!next.converged) break;
      next.iterations += cont.iterations;
      next.jitters += cont.jitters;
      cont = std::move(next);
      last = &cont;
      final_w = w;
    }
  }
  SolveResult r = finalize(inst, cfg, main, *last, final_w);
  if (last != &main) r.continuation_iterations = cont.iterations;
  return r;
}

bool better(const SolveResult& a, const SolveResult& b) {
  if (a.valid_local_min != b.valid_local_min) return a.valid_local_min;
  return a.fnorm < b.fnorm;
}

}  // namespace

SolveResult solve(const ProblemInstance& inst, const SolverConfig& config, const RealVector& g0,
                  double omega0) {
  if (g0.size() != 2 * inst.m()) {
    throw DimensionError("g0 must have length " + std::to_string(2 * inst.m()));
  }
  if (!g0.allFinite() || !std::isfinite(omega0)) throw NumericError("initializer is not finite");
  RealVector z(g0.size() + 1);
  z << g0, omega0;
  SolveResult r = run(inst, config, std::move(z), 2);
  if (r.termination == Termination::omega_collapsed ||
      (r.converged && r.omega < config.omega_zero_threshold)) {
    RealVector g1 = matops::unvec(r.g, inst.m(), 2).col(0);
    if (g1.norm() < 1e-12) g1 = matops::unvec(r.g, inst.m(), 2).col(1);
    try {
      SolveResult alt = solve_omega_zero(inst, config, g1);
      if (better(alt, r)) return alt;
    } catch (const Error&) {
    }
  }
  return r;
}

SolveResult solve_omega_zero(const ProblemInstance& inst, const SolverConfig& config,
                             const RealVector& g0) {
  if (g0.size() != inst.m()) {
    throw DimensionError("g0 must have length " + std::to_string(inst.m()));
  }
  if (!g0.allFinite()) throw NumericError("initializer is not finite");
  return run(inst, config, g0, 1);
}

StartPoint sample_start(const ProblemInstance& inst, std::uint64_t seed, int index) {
  auto rng = make_rng(seed, static_cast<std::uint64_t>(index) + 1);
  const ComplexVector lam = matops::spectrum(inst.A());

  std::vector<double> anchors;
  for (const Complex& l : lam) {
    if (std::abs(l.imag()) > 1e-9) anchors.push_back(std::abs(l.imag()));
  }
  if (anchors.empty()) {
    for (const Complex& l : lam) anchors.push_back(std::abs(l));
  }
  std::sort(anchors.begin(), anchors.end());
  std::vector<double> distinct;
  for (double a : anchors) {
    if (distinct.empty() || a - distinct.back() > 1e-9 * (1.0 + a)) distinct.push_back(a);
  }

  StartPoint s;
  std::normal_distribution<double> normal;
  s.g.resize(2 * inst.m());
  const double bnorm = inst.B().norm();
  for (Eigen::Index i = 0; i < s.g.size(); ++i) s.g(i) = normal(rng) / bnorm;

  const double lo = 0.1 * std::max(distinct.front(), 1e-6);
  const double hi = 10.0 * std::max(distinct.back(), 1e-6);
  std::uniform_real_distribution<double> unif(std::log(lo), std::log(hi));
  const double draw = std::exp(unif(rng));
  const auto k = static_cast<std::size_t>(index);
  s.omega = k < distinct.size() ? distinct[k] : draw;
  return s;
}

bool same_stationary_point(const SolveResult& a, const SolveResult& b) {
  return std::abs(a.fnorm - b.fnorm) < 1e-3 && std::abs(a.omega - b.omega) < 1e-2;
}

MultistartResult multistart(const ProblemInstance& inst, const SolverConfig& config) {
  return multistart(inst, config, {});
}

MultistartResult multistart(const ProblemInstance& inst, const SolverConfig& config,
                            const std::vector<StartPoint>& extra_starts) {
  config.validate();
  const StabilityCheck a1 = check_a1(inst);
  if (!a1.pass) throw StabilityAssumptionError("A is not Hurwitz stable");

  std::vector<StartPoint> starts;
  for (int i = 0; i < config.multistart_count; ++i) {
    starts.push_back(sample_start(inst, config.seed, i));
  }
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());

  // Two complex-pair columns need p >= 2 for CX to have full column rank.
  const bool pair_mode = inst.p() >= 2;
  const bool zero_mode = config.omega_zero_mode;
  if (!pair_mode && !zero_mode) {
    throw RankAssumptionError("p < 2: only the real-eigenvector form applies (enable omega-zero mode)");
  }

  struct Slot {
    std::optional<SolveResult> pair;
    std::optional<SolveResult> zero;
    std::string pair_error;
    std::string zero_error;
  };
  std::vector<Slot> slots(starts.size());
  parallel_for(starts.size(), config.jobs, [&](std::size_t i) {
    SolverConfig cfg = config;
    cfg.seed = config.seed + i;
    if (pair_mode) {
      try {
        slots[i].pair = solve(inst, cfg, starts[i].g, starts[i].omega);
      } catch (const Error& e) {
        slots[i].pair_error = e.what();
      }
    }
    if (zero_mode) {
      try {
        slots[i].zero = solve_omega_zero(inst, cfg, starts[i].g.head(inst.m()));
      } catch (const Error& e) {
        slots[i].zero_error = e.what();
      }
    }
  });

  MultistartResult out;
  std::vector<SolveResult> converged;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (auto* res : {&slots[i].pair, &slots[i].zero}) {
      if (!*res) continue;
      ++out.runs;
      if ((*res)->converged) converged.push_back(std::move(**res));
    }
    for (const auto* msg : {&slots[i].pair_error, &slots[i].zero_error}) {
      if (!msg->empty()) {
        ++out.runs;
        out.failures.push_back({static_cast<int>(i), *msg});
      }
    }
  }
  std::stable_sort(converged.begin(), converged.end(),
                   [](const SolveResult& a, const SolveResult& b) { return a.fnorm < b.fnorm; });
  for (SolveResult& r : converged) {
    auto it = std::find_if(out.distinct.begin(), out.distinct.end(),
                           [&](const SolveResult& d) { return same_stationary_point(d, r); });
    if (it == out.distinct.end()) {
      out.distinct.push_back(std::move(r));
    } else if (r.valid_local_min && !it->valid_local_min) {
      *it = std::move(r);
    }
  }

  out.radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.distinct.size(); ++i) {
    const SolveResult& d = out.distinct[i];
    if (d.valid_local_min && d.fnorm_sparse < out.radius) {
      out.radius = d.fnorm_sparse;
      out.best = i;
    }
  }
  return out;
}

std::vector<SweepRow> weight_sweep(const ProblemInstance& inst, const SolverConfig& config,
                                   const std::vector<double>& weights) {
  if (weights.empty()) throw Error("weight list is empty");
  std::vector<SweepRow> rows;
  std::vector<StartPoint> warm;
  for (double w : weights) {
    SweepRow row;
    row.w = w;
    try {
      SolverConfig cfg = config;
      cfg.w = w;
      cfg.continuation_max_w = 0.0;
      const MultistartResult ms = multistart(inst, cfg, warm);
      const SolveResult* pick = nullptr;
      for (const SolveResult& d : ms.distinct) {
        if (d.raw_valid && (pick == nullptr || d.cost < pick->cost)) pick = &d;
      }
      if (pick != nullptr) {
        row.result = *pick;
        if (pick->columns == 2) warm = {StartPoint{pick->g, pick->omega}};
      } else {
        row.error = "no converged point with alpha(A(Delta)) = 0";
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sparsesr
