#include "powcalc/optimizer.hpp"

#include <algorithm>
#include <map>

#include "powcalc/parallel.hpp"
#include "powcalc/powmodel.hpp"

namespace powcalc {

const char* constraint_name(Constraint c) {
  switch (c) {
    case Constraint::BoundS: return "bound_s";
    case Constraint::BoundR: return "bound_r";
    case Constraint::BoundD: return "bound_d";
    case Constraint::Epsilon: return "epsilon";
    case Constraint::ThLambda: return "th_lambda";
    case Constraint::ThPrimeGuard: return "th_prime_guard";
    case Constraint::TauLower: return "tau_l";
    case Constraint::TauUpper: return "tau_u";
    case Constraint::Delta1: return "delta1";
    case Constraint::Delta: return "delta";
    case Constraint::Delta2: return "delta2";
    case Constraint::MuRatio: return "mu_ratio";
    case Constraint::PoolSize: return "pool_size";
    case Constraint::PoolPower: return "pool_power";
  }
  return "?";
}

namespace {

template <class Ctx>
class Evaluator {
 public:
  using R = typename Ctx::R;

  Evaluator(const ScenarioConstants& k, Ctx ctx)
      : k_(k),
        ctx_(std::move(ctx)),
        cth_(ceil_rat(k.th / k.T - 1)),
        fth_(floor_rat(k.th_prime / k.T - 1)),
        m_(floor_rat(k.mu / k.T)),
        T_(ctx_.num(k.T)),
        tau_l_(ctx_.num(k.tau_l)),
        tau_u_(ctx_.num(k.tau_u)),
        eps_(ctx_.num(k.epsilon)),
        delta_(ctx_.num(k.delta)),
        delta1_(ctx_.num(k.delta1)),
        delta2_(ctx_.num(k.delta2)) {}

  FeasibilityVerdict check(int s, int r, int d) const {
    FeasibilityVerdict v;
    v.tier = ctx_.tier();
    auto fail = [&](Constraint c) {
      v.feasible = false;
      v.violated.push_back(c);
    };
    if (s < k_.s_l || s > k_.s_u) fail(Constraint::BoundS);
    if (r < k_.r_l || r > k_.r_u) fail(Constraint::BoundR);
    if (d < k_.d_l || d > k_.d_u) fail(Constraint::BoundD);
    if (s < 1 || r < 1 || d < 1) return v;  // formulas undefined

    const BigInt lam = lambda(r, s);
    if (failure_exceeds_eps(s, d, lam)) fail(Constraint::Epsilon);
    if (!(cth_ < lam)) fail(Constraint::ThLambda);
    if (!(fth_ > 0)) fail(Constraint::ThPrimeGuard);

    const R t = T_ * model::expected_rounds(ctx_, s, d, lam);
    if (!(tau_l_ <= t)) fail(Constraint::TauLower);
    if (!(t <= tau_u_)) fail(Constraint::TauUpper);

    const auto lt = model::time_lt(ctx_, s, d, fth_);
    if (lt.applicable && !(lt.value <= delta1_)) fail(Constraint::Delta1);
    const auto gt = model::time_gt(ctx_, s, d, lam, cth_);
    if (gt.applicable && !(gt.value <= delta_)) fail(Constraint::Delta);

    if (!(m_ >= 0)) {
      fail(Constraint::MuRatio);
    } else if (!(model::dispute(ctx_, s, d, m_) <= delta2_)) {
      fail(Constraint::Delta2);
    }
    if (!(k_.l < s)) fail(Constraint::PoolSize);
    if (!pool_bound_holds(k_.l, s, k_.c, k_.delta3)) fail(Constraint::PoolPower);
    return v;
  }

  bool robust(int s, int r, int d) const {
    for (int sp = s - k_.u_s; sp <= s; ++sp)
      for (int dp = d - k_.u_d; dp <= d + k_.u_d; ++dp)
        if (!check(sp, r, dp).feasible) return false;
    return true;
  }

 private:
  bool failure_exceeds_eps(int s, int d, const BigInt& lam) const {
    return model::failure(ctx_, s, d, lam) > eps_;
  }

  const ScenarioConstants& k_;
  Ctx ctx_;
  BigInt cth_, fth_, m_;
  R T_, tau_l_, tau_u_, eps_, delta_, delta1_, delta2_;
};

template <class F>
auto with_tier(const PrecisionTier& tier, F&& f) {
  if (tier.is_exact()) return f(ExactCtx(tier.digits));
  return f(FastCtx{});
}

}  // namespace

double cost(int s, int r, int d, const ScenarioConstants& k) {
  const double e = model::expected_rounds(FastCtx{}, s, d, lambda(r, s));
  return k.TVC.convert_to<double>() * e * s + k.TFC.convert_to<double>() * s;
}

double robust_cost(int s, int r, int d, const ScenarioConstants& k) {
  double best = cost(s, r, d, k);
  for (int sp = std::max(1, s - k.u_s); sp <= s; ++sp)
    for (int dp = std::max(1, d - k.u_d); dp <= d + k.u_d; ++dp) best = std::max(best, cost(sp, r, dp, k));
  return best;
}

FeasibilityVerdict check_feasible(int s, int r, int d, const ScenarioConstants& k, const PrecisionTier& tier) {
  return with_tier(tier, [&](auto ctx) { return Evaluator(k, ctx).check(s, r, d); });
}

bool robust_feasible(int s, int r, int d, const ScenarioConstants& k, const PrecisionTier& tier) {
  return with_tier(tier, [&](auto ctx) { return Evaluator(k, ctx).robust(s, r, d); });
}

OptimizeReport optimize(const ScenarioConstants& k, const OptimizeOptions& opt) {
  k.validate();
  OptimizeReport rep;
  const Evaluator<FastCtx> fast(k, FastCtx{});

  // Nominal feasibility over the bounds widened by the uncertainty box, so
  // that robust feasibility becomes a lookup.
  const int s0 = k.s_l - k.u_s, d0 = k.d_l - k.u_d;
  const int ns = k.s_u - s0 + 1, nr = k.r_u - k.r_l + 1, nd = k.d_u + k.u_d - d0 + 1;
  std::vector<char> ok(static_cast<std::size_t>(ns) * nr * nd, 0);
  auto at = [&](int s, int r, int d) -> char& {
    return ok[(static_cast<std::size_t>(s - s0) * nr + (r - k.r_l)) * nd + (d - d0)];
  };
  parallel_for(static_cast<std::size_t>(ns), opt.threads, [&](std::size_t i) {
    const int s = s0 + static_cast<int>(i);
    for (int r = k.r_l; r <= k.r_u; ++r)
      for (int d = d0; d < d0 + nd; ++d) at(s, r, d) = fast.check(s, r, d).feasible ? 1 : 0;
  });

  rep.grid_size = static_cast<std::size_t>(k.s_u - k.s_l + 1) * nr * (k.d_u - k.d_l + 1);
  std::vector<CandidateResult> list;
  for (int s = k.s_l; s <= k.s_u; ++s)
    for (int r = k.r_l; r <= k.r_u; ++r)
      for (int d = k.d_l; d <= k.d_u; ++d) {
        if (!at(s, r, d)) continue;
        ++rep.fast_feasible;
        bool robust = true;
        for (int sp = s - k.u_s; sp <= s && robust; ++sp)
          for (int dp = d - k.u_d; dp <= d + k.u_d && robust; ++dp) robust = at(sp, r, dp) != 0;
        if (!robust) continue;
        ++rep.fast_robust;
        list.push_back({s, r, d, cost(s, r, d, k), 0.0});
      }

  // One tuple per d: lower cost, then lower r, then lower s.
  std::map<int, CandidateResult, std::greater<int>> best;
  for (const auto& c : list) {
    auto it = best.find(c.d);
    if (it == best.end()) {
      best.emplace(c.d, c);
      continue;
    }
    const auto& b = it->second;
    if (std::tie(c.cost, c.r, c.s) < std::tie(b.cost, b.r, b.s)) it->second = c;
  }
  if (best.empty()) return rep;

  double cm = best.begin()->second.cost;
  for (const auto& [d, c] : best) cm = std::min(cm, c.cost);
  const double bound = k.alpha.convert_to<double>() * cm;

  std::vector<CandidateResult> top;
  for (const auto& [d, c] : best) {
    if (c.cost > bound) continue;
    if (static_cast<int>(top.size()) == k.report_count) break;
    top.push_back(c);
  }

  const Evaluator<ExactCtx> exact(k, ExactCtx(opt.exact_digits));
  for (auto c : top) {
    c.robust_cost = robust_cost(c.s, c.r, c.d, k);
    if (exact.robust(c.s, c.r, c.d))
      rep.results.push_back(c);
    else
      rep.exact_rejected.push_back(c);
  }
  return rep;
}

std::vector<CandidateResult> enumerate_optimal(const ScenarioConstants& k) { return optimize(k).results; }

std::vector<int> feasible_r_range(int s, int d, const ScenarioConstants& k, const PrecisionTier& tier) {
  std::vector<int> out;
  with_tier(tier, [&](auto ctx) {
    const Evaluator ev(k, ctx);
    for (int r = k.r_l; r <= k.r_u; ++r)
      if (ev.robust(s, r, d)) out.push_back(r);
    return 0;
  });
  return out;
}

}  // namespace powcalc
