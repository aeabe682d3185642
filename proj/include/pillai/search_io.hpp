#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pillai/search.hpp"

namespace pillai {

/// {"config": {...}, "solutions": [{"c": "-6", "representations": [{"n": 6, "m": 2}, ...]}, ...]}
inline nlohmann::ordered_json search_json(const SolutionTable& t) {
  nlohmann::ordered_json j;
  j["config"] = {{"n_min", t.config.n_min}, {"n_max", t.config.n_max}, {"m_min", t.config.m_min},
                 {"m_max", t.config.m_max}, {"base", t.config.base.get_str()},
                 {"convention", std::string(convention_name(t.config))}};
  j["solutions"] = nlohmann::ordered_json::array();
  for (const auto& [c, reps] : multi_represented(t)) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& rep : reps) r.push_back({{"n", rep.n}, {"m", rep.m}});
    j["solutions"].push_back({{"c", c.get_str()}, {"representations", r}});
  }
  return j;
}

/// One row per representation, header `c,n,m`.
inline void write_search_csv(std::ostream& os, const SolutionTable& t) {
  os << "c,n,m\n";
  for (const auto& [c, reps] : multi_represented(t))
    for (const auto& rep : reps) os << c.get_str() << ',' << rep.n << ',' << rep.m << '\n';
}

inline void write_search_table(std::ostream& os, const SolutionTable& t) {
  const auto rows = multi_represented(t);
  os << "c\trepresentations (n, m)\n";
  for (const auto& [c, reps] : rows) {
    os << c.get_str() << '\t';
    for (std::size_t i = 0; i < reps.size(); ++i) os << (i ? " " : "") << '(' << reps[i].n << ", " << reps[i].m << ')';
    os << '\n';
  }
  os << rows.size() << " value(s) of c with at least two representations\n";
}

}  // namespace pillai
