#pragma once

#include <algorithm>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "pillai/error.hpp"
#include "pillai/rigor.hpp"

namespace pillai {

/// Evaluates a fixed real number to a ball at the requested precision.
using RealProvider = std::function<BallReal(mpfr_prec_t)>;

struct CFExpansion {
  std::vector<mpz_class> quotients;
  std::vector<mpz_class> p;  // p_k
  std::vector<mpz_class> q;  // q_k
  long certified_through = -1;
  mpfr_prec_t source_precision = 0;
  bool terminated = false;  // the input was rational and the expansion ended

  std::size_t size() const { return quotients.size(); }
};

/// Stop after `count` quotients, or once q_k > q_threshold plus `extra` more.
struct CFStop {
  std::size_t count = 0;
  std::optional<mpz_class> q_threshold;
  std::size_t extra = 0;

  static CFStop terms(std::size_t n) { return {n, std::nullopt, 0}; }
  static CFStop q_exceeds(const mpz_class& threshold, std::size_t extra = 0) { return {0, threshold, extra}; }
};

namespace detail {

inline mpq_class to_mpq(const Mpfr& x) {
  mpq_class r;
  mpfr_get_q(r.get_mpq_t(), x.get());
  return r;
}

inline mpz_class floor_q(const mpq_class& x) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

/// Quotients shared by every real in [lo, hi], computed exactly on the endpoints.
/// Sets `terminated` when lo == hi and the expansion ends.
inline std::vector<mpz_class> common_quotients(mpq_class lo, mpq_class hi, std::size_t limit, bool& terminated) {
  std::vector<mpz_class> out;
  terminated = false;
  while (out.size() < limit) {
    const mpz_class a = floor_q(lo);
    if (floor_q(hi) != a) break;
    out.push_back(a);
    const mpq_class fl = lo - a, fh = hi - a;
    if (fl == 0) {
      // an integer lies in the interval; only an exact input continues cleanly
      if (fh == 0) terminated = true;
      break;
    }
    // t -> 1/t reverses the order
    const mpq_class nlo = 1 / fh, nhi = 1 / fl;
    lo = nlo;
    hi = nhi;
  }
  return out;
}

inline void fill_convergents(CFExpansion& e) {
  e.p.clear();
  e.q.clear();
  mpz_class p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  for (const auto& a : e.quotients) {
    mpz_class p = a * p1 + p2, q = a * q1 + q2;
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
    e.p.push_back(p);
    e.q.push_back(q);
  }
  e.certified_through = static_cast<long>(e.quotients.size()) - 1;
}

inline bool stop_reached(const CFExpansion& e, const CFStop& stop) {
  if (stop.q_threshold) {
    for (std::size_t k = 0; k < e.q.size(); ++k)
      if (e.q[k] > *stop.q_threshold) return e.q.size() >= k + 1 + stop.extra;
    return false;
  }
  return e.quotients.size() >= stop.count;
}

}  // namespace detail

/// Certified continued-fraction expansion of x, refining precision until the
/// stop condition is met or the expansion terminates.
inline CFExpansion expand(const RealProvider& x, const CFStop& stop, const PrecisionPolicy& policy = {}) {
  policy.validate();
  std::size_t limit = stop.q_threshold ? static_cast<std::size_t>(-1) : stop.count;
  return with_refinement(
      [&](mpfr_prec_t bits) -> std::optional<CFExpansion> {
        const BallReal v = x(bits);
        if (!v.is_finite()) return std::nullopt;
        CFExpansion e;
        e.source_precision = bits;
        // enough quotients for any stop: q_k grows at least like Fibonacci
        std::size_t cap = limit;
        if (stop.q_threshold)
          cap = 2 * mpz_sizeinbase(stop.q_threshold->get_mpz_t(), 2) + stop.extra + 8;
        e.quotients = detail::common_quotients(detail::to_mpq(v.lower()), detail::to_mpq(v.upper()), cap, e.terminated);
        detail::fill_convergents(e);
        if (detail::stop_reached(e, stop)) {
          if (stop.q_threshold) {
            std::size_t keep = 0;
            while (!(e.q[keep] > *stop.q_threshold)) ++keep;
            keep += 1 + stop.extra;
            e.quotients.resize(keep);
          } else {
            e.quotients.resize(stop.count);
          }
          detail::fill_convergents(e);
          return e;
        }
        if (e.terminated) return e;
        return std::nullopt;
      },
      policy, "continued fraction expansion");
}

/// (p_k, q_k) in lowest terms.
inline std::pair<mpz_class, mpz_class> convergent(const CFExpansion& e, long k) {
  if (k < 0 || k > e.certified_through)
    throw Error(ErrorKind::IndexBeyondCertified,
                "convergent " + std::to_string(k) + " beyond certified index " + std::to_string(e.certified_through));
  return {e.p[static_cast<std::size_t>(k)], e.q[static_cast<std::size_t>(k)]};
}

/// First index with q_k > threshold, if any.
inline std::optional<std::size_t> first_index_above(const CFExpansion& e, const mpz_class& threshold) {
  for (std::size_t k = 0; k < e.q.size(); ++k)
    if (e.q[k] > threshold) return k;
  return std::nullopt;
}

/// Search for solutions of 0 < |u tau - v + mu| < A B^{-w} with u <= M.
struct ReductionProblem {
  RealProvider tau;
  RealProvider mu;
  BallReal A;
  BallReal B;
  mpz_class M;

  void validate() const {
    if (!tau || !mu) throw Error(ErrorKind::InvalidArgument, "tau and mu providers are required");
    if (certified_sign(A) != Sign::Positive) throw Error(ErrorKind::InvalidArgument, "A > 0 is not certified");
    if (!certainly_gt(B, BallReal::exact(1, B.precision()))) throw Error(ErrorKind::InvalidArgument, "B > 1 is not certified");
    if (M <= 0) throw Error(ErrorKind::InvalidArgument, "M must be positive");
  }
};

struct ReductionOutcome {
  long convergent_index = -1;
  mpz_class q;
  BallReal epsilon;  // enclosure of ||mu q|| - M ||tau q||
  BallReal w;        // enclosure of log(A q / eps_lower) / log B
  mpz_class w_bound;  // ceiling of the upper endpoint of w

  BallReal epsilon_lower() const { return epsilon.lower_ball(); }
  /// Largest exponent w that a solution may still have.
  long max_exponent() const { return w_bound.get_si() - 1; }
};

struct ReductionOptions {
  std::size_t extra_convergents = 16;
  PrecisionPolicy policy{};
};

namespace detail {

inline mpfr_prec_t reduction_bits(const mpz_class& q, const mpz_class& M) {
  return static_cast<mpfr_prec_t>(mpz_sizeinbase(q.get_mpz_t(), 2) + mpz_sizeinbase(M.get_mpz_t(), 2) + 64);
}

/// ||v q|| at `bits`, or nothing if the ball is too wide.
inline std::optional<BallReal> distance_times(const BallReal& v, const mpz_class& q) {
  try {
    return nearest_int_distance(v * q);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::AmbiguousNearestInteger) return std::nullopt;
    throw;
  }
}

inline BallReal w_enclosure(const BallReal& A, const mpz_class& q, const BallReal& eps_lower, const BallReal& B) {
  return log(A.upper_ball() * q / eps_lower) / log(B.lower_ball());
}

inline mpz_class ceil_upper(const BallReal& w) {
  Mpfr c(w.precision());
  mpfr_ceil(c.get(), w.upper().get());
  return c.floor();
}

struct Attempt {
  enum class Status { Positive, NotPositive, Undecided } status = Status::Undecided;
  BallReal epsilon;
};

inline Attempt try_epsilon(const BallReal& tau_dist, const BallReal& mu_value, const mpz_class& q, const mpz_class& M) {
  const auto mu_dist = distance_times(mu_value, q);
  if (!mu_dist) return {};
  BallReal eps = *mu_dist - tau_dist * M;
  const Sign s = certified_sign(eps);
  if (s == Sign::Positive) return {Attempt::Status::Positive, std::move(eps)};
  if (s == Sign::Negative || mpfr_sgn(eps.upper().get()) <= 0) return {Attempt::Status::NotPositive, std::move(eps)};
  return {Attempt::Status::Undecided, std::move(eps)};
}

}  // namespace detail

/// Convergent data reused across many mu: q_k > 6M for k = first..first+extra,
/// with ||tau q_k|| enclosed at a precision that serves every k.
struct ReductionBasis {
  CFExpansion cf;
  std::size_t first = 0;
  mpz_class M;
  mpfr_prec_t bits = 0;
  std::vector<BallReal> tau_dist;  // indexed by k - first

  std::size_t last() const { return cf.q.size() - 1; }
};

inline ReductionBasis make_basis(const RealProvider& tau, const mpz_class& M, const ReductionOptions& opt = {}) {
  const mpz_class six_m = 6 * M;
  ReductionBasis b;
  b.M = M;
  b.cf = expand(tau, CFStop::q_exceeds(six_m, opt.extra_convergents), opt.policy);
  const auto first = first_index_above(b.cf, six_m);
  if (!first) throw Error(ErrorKind::PrecisionExhausted, "no convergent with q > 6M");
  b.first = *first;
  const PrecisionPolicy pol = opt.policy.starting_at_least(detail::reduction_bits(b.cf.q.back(), M));
  b.bits = with_refinement(
      [&](mpfr_prec_t bits) -> std::optional<mpfr_prec_t> {
        const BallReal t = tau(bits);
        std::vector<BallReal> d;
        for (std::size_t k = b.first; k < b.cf.q.size(); ++k) {
          auto x = detail::distance_times(t, b.cf.q[k]);
          if (!x) return std::nullopt;
          d.push_back(std::move(*x));
        }
        b.tau_dist = std::move(d);
        return bits;
      },
      pol, "||tau q||");
  return b;
}

namespace detail {

/// Tries every basis convergent in order for one mu; nothing if none works.
inline std::optional<ReductionOutcome> reduce_on_basis(const ReductionBasis& basis, const RealProvider& mu,
                                                       const BallReal& A, const BallReal& B,
                                                       const PrecisionPolicy& policy, std::size_t start = 0) {
  const std::size_t count = basis.cf.q.size() - basis.first;
  mpfr_prec_t bits = basis.bits;
  BallReal mu_value = mu(bits);
  for (std::size_t i = start; i < count; ++i) {
    const mpz_class& q = basis.cf.q[basis.first + i];
    Attempt a = try_epsilon(basis.tau_dist[i], mu_value, q, basis.M);
    while (a.status == Attempt::Status::Undecided && bits < policy.max_bits) {
      bits = std::min(policy.max_bits, policy.next(bits));
      mu_value = mu(bits);
      a = try_epsilon(basis.tau_dist[i], mu_value, q, basis.M);
    }
    if (a.status != Attempt::Status::Positive) continue;
    ReductionOutcome out;
    out.convergent_index = static_cast<long>(basis.first + i);
    out.q = q;
    const BallReal eps_lo = a.epsilon.lower_ball();
    out.w = w_enclosure(A, q, eps_lo, B);
    out.w_bound = ceil_upper(out.w);
    out.epsilon = std::move(a.epsilon);
    return out;
  }
  return std::nullopt;
}

}  // namespace detail

/// Dujella-Petho reduction: the first convergent with q > 6M and certified
/// eps > 0 gives w_bound such that no solution has u <= M and w >= w_bound.
inline ReductionOutcome dp_reduce(const ReductionProblem& prob, const ReductionOptions& opt = {}) {
  prob.validate();
  const ReductionBasis basis = make_basis(prob.tau, prob.M, opt);
  auto out = detail::reduce_on_basis(basis, prob.mu, prob.A, prob.B, opt.policy);
  if (!out)
    throw Error(ErrorKind::EpsilonNeverPositive,
                "no convergent among k = " + std::to_string(basis.first) + ".." + std::to_string(basis.last()) +
                    " gives a positive epsilon");
  return *out;
}

template <class Key>
struct FamilyOutcome {
  std::vector<Key> keys;
  std::vector<std::optional<ReductionOutcome>> per_key;  // empty for exceptional keys
  std::size_t first_convergent = 0;
  BallReal min_epsilon;
  mpz_class max_w_bound = 0;
  std::vector<Key> exceptional;
  std::vector<Key> fallbacks;  // keys that needed a later convergent

  long max_exponent() const { return max_w_bound.get_si() - 1; }
};

/// Runs the reduction for mu_key over `keys`, all against the same tau and
/// the same convergent where possible. Keys for which no convergent up to
/// first + extra works are reported as exceptional.
template <class Key, class MuFamily>
FamilyOutcome<Key> family_reduce(const RealProvider& tau, const MuFamily& mu_family, const std::vector<Key>& keys,
                                 const BallReal& A, const BallReal& B, const mpz_class& M,
                                 const ReductionOptions& opt = {}, unsigned threads = 1) {
  if (keys.empty()) throw Error(ErrorKind::InvalidArgument, "family range is empty");
  if (certified_sign(A) != Sign::Positive || !certainly_gt(B, BallReal::exact(1, B.precision())))
    throw Error(ErrorKind::InvalidArgument, "A > 0 and B > 1 must be certified");
  const ReductionBasis basis = make_basis(tau, M, opt);
  FamilyOutcome<Key> out;
  out.keys = keys;
  out.first_convergent = basis.first;
  out.per_key.resize(keys.size());

  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Key& key = keys[i];
      RealProvider mu = [&mu_family, &key](mpfr_prec_t bits) { return mu_family(key, bits); };
      out.per_key[i] = detail::reduce_on_basis(basis, mu, A, B, opt.policy);
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(keys.size())));
  if (threads == 1) {
    work(0, keys.size());
  } else {
    std::vector<std::future<void>> tasks;
    for (unsigned t = 0; t < threads; ++t)
      tasks.push_back(std::async(std::launch::async, work, keys.size() * t / threads, keys.size() * (t + 1) / threads));
    for (auto& f : tasks) f.get();
  }

  bool have_min = false;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& r = out.per_key[i];
    if (!r) {
      out.exceptional.push_back(keys[i]);
      continue;
    }
    if (r->convergent_index != static_cast<long>(basis.first)) out.fallbacks.push_back(keys[i]);
    if (!have_min || cmp(r->epsilon.lower(), out.min_epsilon.lower()) < 0) {
      out.min_epsilon = r->epsilon;
      have_min = true;
    }
    out.max_w_bound = std::max(out.max_w_bound, r->w_bound);
  }
  return out;
}

inline std::vector<long> index_range(long from, long to) {
  std::vector<long> r;
  for (long i = from; i <= to; ++i) r.push_back(i);
  return r;
}

}  // namespace pillai
