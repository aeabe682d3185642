#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pillai/error.hpp"
#include "pillai/sequence.hpp"

namespace pillai {

/// Ranges and counting rules for the brute-force search of U_n - base^m = c.
/// Indices follow the listing convention (U_0 is the first initial value).
struct SearchConfig {
  long n_min = 0;
  long n_max = 0;
  long m_min = 0;
  long m_max = 0;
  mpz_class base = 3;
  /// Skip n whenever U_n = U_{n+1}: for Padovan this drops n = 1, 2 (counting
  /// n = 3) and n = 4 (counting n = 5).
  bool dedup = true;

  void validate() const {
    if (n_min < 0 || m_min < 0) throw Error(ErrorKind::InvalidArgument, "search ranges must be non-negative");
    if (n_max < n_min || m_max < m_min) throw Error(ErrorKind::InvalidArgument, "empty search range");
    if (base < 2) throw Error(ErrorKind::InvalidArgument, "base must be >= 2");
  }

  /// Convention under which the oracle reproduces the published c-set.
  static SearchConfig theorem(long n_max = 500, long m_max = 200) { return {5, n_max, 1, m_max, 3, true}; }
  /// The convention as written next to the theorem: n >= 3, n != 4, m >= 0.
  static SearchConfig stated(long n_max = 500, long m_max = 200) { return {3, n_max, 0, m_max, 3, true}; }
};

inline std::string_view convention_name(const SearchConfig& c) {
  if (c.n_min == 5 && c.m_min == 1 && c.dedup) return "theorem";
  if (c.n_min == 3 && c.m_min == 0 && c.dedup) return "stated";
  return "custom";
}

struct Representation {
  long n = 0;
  long m = 0;
  mpz_class c;

  friend bool operator==(const Representation& a, const Representation& b) {
    return a.n == b.n && a.m == b.m && a.c == b.c;
  }
  friend bool operator<(const Representation& a, const Representation& b) {
    return a.n != b.n ? a.n < b.n : a.m < b.m;
  }
};

/// Every in-range triple, grouped by c; each list sorted by (n, m).
struct SolutionTable {
  SearchConfig config;
  std::map<mpz_class, std::vector<Representation>> by_c;

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& [c, reps] : by_c) s += reps.size();
    return s;
  }
};

namespace detail {

inline bool skipped_by_dedup(const std::vector<mpz_class>& u, long n) {
  const auto i = static_cast<std::size_t>(n);
  return i + 1 < u.size() && u[i] == u[i + 1];
}

inline void enumerate_into(const RecurrenceSpec& spec, const SearchConfig& cfg, long n_lo, long n_hi,
                           const std::vector<mpz_class>& u, SolutionTable& table) {
  std::vector<mpz_class> powers;
  mpz_class p = 1;
  for (long m = 0; m <= cfg.m_max; ++m) {
    if (m >= cfg.m_min) powers.push_back(p);
    p *= cfg.base;
  }
  (void)spec;
  for (long n = n_lo; n <= n_hi; ++n) {
    if (cfg.dedup && skipped_by_dedup(u, n)) continue;
    const mpz_class& un = u[static_cast<std::size_t>(n)];
    for (std::size_t j = 0; j < powers.size(); ++j) {
      mpz_class c = un - powers[j];
      const long m = cfg.m_min + static_cast<long>(j);
      table.by_c[c].push_back({n, m, c});
    }
  }
}

}  // namespace detail

inline void merge_into(SolutionTable& dst, const SolutionTable& src) {
  for (const auto& [c, reps] : src.by_c) {
    auto& v = dst.by_c[c];
    v.insert(v.end(), reps.begin(), reps.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

/// Exhaustive table of U_n - base^m for the configured ranges. With shards > 1
/// the n-range is split across tasks and merged deterministically.
inline SolutionTable enumerate(const RecurrenceSpec& spec, const SearchConfig& cfg, unsigned shards = 1) {
  cfg.validate();
  const auto u = terms(spec, static_cast<std::size_t>(cfg.n_max + 2));
  SolutionTable table;
  table.config = cfg;
  const long span = cfg.n_max - cfg.n_min + 1;
  shards = std::max(1U, std::min<unsigned>(shards, static_cast<unsigned>(span)));
  if (shards == 1) {
    detail::enumerate_into(spec, cfg, cfg.n_min, cfg.n_max, u, table);
  } else {
    std::vector<std::future<SolutionTable>> parts;
    for (unsigned s = 0; s < shards; ++s) {
      const long lo = cfg.n_min + span * s / shards;
      const long hi = cfg.n_min + span * (s + 1) / shards - 1;
      parts.push_back(std::async(std::launch::async, [&, lo, hi] {
        SolutionTable t;
        detail::enumerate_into(spec, cfg, lo, hi, u, t);
        return t;
      }));
    }
    for (auto& f : parts) merge_into(table, f.get());
  }
  for (auto& [c, reps] : table.by_c) std::sort(reps.begin(), reps.end());
  return table;
}

/// All c with at least `threshold` representations, ascending in c.
inline std::vector<std::pair<mpz_class, std::vector<Representation>>> multi_represented(const SolutionTable& table,
                                                                                       std::size_t threshold = 2) {
  if (threshold < 2) throw Error(ErrorKind::InvalidArgument, "threshold must be >= 2");
  std::vector<std::pair<mpz_class, std::vector<Representation>>> out;
  for (const auto& [c, reps] : table.by_c)
    if (reps.size() >= threshold) out.emplace_back(c, reps);
  return out;
}

inline bool verify_representation(const RecurrenceSpec& spec, long n, long m, const mpz_class& c,
                                  const mpz_class& base = 3) {
  if (n < 0 || m < 0) return false;
  mpz_class p;
  mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(m));
  return term(spec, static_cast<std::size_t>(n)) - p == c;
}

/// A published list entry: c and the index pairs (n, m) claimed for it.
struct ClaimedEntry {
  mpz_class c;
  std::vector<std::pair<long, long>> reps;
};

struct IndexMismatch {
  mpz_class c;
  std::vector<std::pair<long, long>> claimed_not_found;
  std::vector<std::pair<long, long>> found_not_claimed;
};

struct DiffReport {
  std::vector<mpz_class> claimed_absent;     // claimed c with fewer than `threshold` representations found
  std::vector<mpz_class> present_unclaimed;  // multi-represented c missing from the claim
  std::vector<IndexMismatch> index_mismatches;

  bool empty() const { return claimed_absent.empty() && present_unclaimed.empty() && index_mismatches.empty(); }
};

inline DiffReport diff_against_claim(const SolutionTable& table, const std::vector<ClaimedEntry>& claimed,
                                     std::size_t threshold = 2) {
  DiffReport rep;
  const auto found = multi_represented(table, threshold);
  std::map<mpz_class, std::vector<std::pair<long, long>>> found_map;
  for (const auto& [c, reps] : found)
    for (const auto& r : reps) found_map[c].emplace_back(r.n, r.m);

  std::map<mpz_class, const ClaimedEntry*> claimed_map;
  for (const auto& e : claimed) claimed_map[e.c] = &e;

  for (const auto& [c, entry] : claimed_map) {
    auto it = found_map.find(c);
    if (it == found_map.end()) {
      rep.claimed_absent.push_back(c);
      continue;
    }
    IndexMismatch mm{c, {}, {}};
    for (const auto& r : entry->reps)
      if (std::find(it->second.begin(), it->second.end(), r) == it->second.end()) mm.claimed_not_found.push_back(r);
    for (const auto& r : it->second)
      if (std::find(entry->reps.begin(), entry->reps.end(), r) == entry->reps.end()) mm.found_not_claimed.push_back(r);
    if (!mm.claimed_not_found.empty() || !mm.found_not_claimed.empty()) rep.index_mismatches.push_back(std::move(mm));
  }
  for (const auto& [c, reps] : found_map)
    if (!claimed_map.count(c)) rep.present_unclaimed.push_back(c);
  return rep;
}

/// The published list, verbatim, including the parenthesised extra
/// representations for c = 0 and c = 1.
inline std::vector<ClaimedEntry> published_claim() {
  return {{-6, {{13, 3}, {6, 2}}},
          {0, {{10, 2}, {6, 1}, {3, 0}}},
          {1, {{14, 3}, {7, 1}, {5, 0}}},
          {22, {{20, 5}, {16, 3}}},
          {87, {{24, 6}, {17, 3}}}};
}

/// The published list with the indices that verify against the sequence.
inline std::vector<ClaimedEntry> corrected_claim() {
  return {{-6, {{13, 3}, {6, 2}}},
          {0, {{10, 2}, {6, 1}, {3, 0}}},
          {1, {{14, 3}, {7, 1}, {5, 0}}},
          {22, {{22, 5}, {16, 3}}},
          {87, {{26, 6}, {19, 3}}}};
}

}  // namespace pillai
