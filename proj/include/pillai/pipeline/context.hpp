#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <optional>

#include "pillai/cfrac.hpp"
#include "pillai/error.hpp"
#include "pillai/rigor.hpp"
#include "pillai/sequence.hpp"

namespace pillai {

/// Roots, Binet data and the logarithms the reductions need, evaluated on
/// demand at any precision and cached per precision. Safe to share across
/// threads.
class NumberContext {
 public:
  struct Entry {
    CubicRoots roots;
    BinetCoefficients binet;
    BallReal log_alpha;
    BallReal log_base;
    BallReal log_a;
  };

  NumberContext(RecurrenceSpec spec, mpz_class base, std::optional<BinetWindow> window)
      : spec_(std::move(spec)), base_(std::move(base)), window_(std::move(window)) {}

  const RecurrenceSpec& spec() const { return spec_; }
  const mpz_class& base() const { return base_; }

  const Entry& at(mpfr_prec_t bits) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entry_locked(bits);
  }

  /// log(alpha^k - 1), k >= 1.
  BallReal log_alpha_pow_minus_one(long k, mpfr_prec_t bits) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& t = alpha_table_[bits];
    if (t.empty()) t.push_back(BallReal::exact(1, bits));  // alpha^0, placeholder at index 0
    const Entry& e = entry_locked(bits);
    while (static_cast<long>(t.size()) <= k) {
      pow_alpha_[bits] = pow_alpha_.count(bits) ? pow_alpha_[bits] * e.roots.alpha : e.roots.alpha;
      t.push_back(log(pow_alpha_[bits] - 1));
    }
    return t[static_cast<std::size_t>(k)];
  }

  /// log(base^l - 1), l >= 1.
  BallReal log_base_pow_minus_one(long l, mpfr_prec_t bits) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& t = base_table_[bits];
    if (t.empty()) t.push_back(BallReal::exact(0, bits));
    while (static_cast<long>(t.size()) <= l) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), base_.get_mpz_t(), static_cast<unsigned long>(t.size()));
      t.push_back(log(BallReal::exact(p - 1, bits)));
    }
    return t[static_cast<std::size_t>(l)];
  }

  RealProvider tau() const {
    return [this](mpfr_prec_t b) { const Entry& e = at(b); return e.log_alpha / e.log_base; };
  }
  RealProvider tau_reciprocal() const {
    return [this](mpfr_prec_t b) { const Entry& e = at(b); return e.log_base / e.log_alpha; };
  }

 private:
  const Entry& entry_locked(mpfr_prec_t bits) const {
    auto it = cache_.find(bits);
    if (it != cache_.end()) return it->second;
    Entry e;
    e.roots = characteristic_roots(spec_, bits);
    e.binet = binet_fit(spec_, e.roots, window_);
    e.log_alpha = log(e.roots.alpha);
    e.log_base = log(BallReal::exact(base_, bits));
    e.log_a = log(e.binet.a);
    return cache_.emplace(bits, std::move(e)).first->second;
  }

  RecurrenceSpec spec_;
  mpz_class base_;
  std::optional<BinetWindow> window_;
  mutable std::mutex mu_;
  mutable std::map<mpfr_prec_t, Entry> cache_;
  mutable std::map<mpfr_prec_t, std::deque<BallReal>> alpha_table_;
  mutable std::map<mpfr_prec_t, BallReal> pow_alpha_;
  mutable std::map<mpfr_prec_t, std::deque<BallReal>> base_table_;
};

}  // namespace pillai
