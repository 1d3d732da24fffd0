#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "fogdisc/matchmaker.hpp"

namespace fogdisc {

// delay and price are costs; the remaining fields are benefits.
inline bool qos_is_cost(QosField f) {
  return f == QosField::delay_ms || f == QosField::price;
}

class WeightVector {
 public:
  // Normalizes to sum 1; missing fields get weight 0.
  static WeightVector make(const std::map<QosField, double>& raw) {
    WeightVector w;
    double sum = 0;
    for (const auto& [f, v] : raw) {
      if (v < 0) raise(Errc::range_violation, qos_field_name(f));
      sum += v;
    }
    if (sum <= 0) raise(Errc::range_violation, "weights");
    for (size_t i = 0; i < kQosFields.size(); ++i) {
      auto it = raw.find(kQosFields[i]);
      w.weights_[i] = it == raw.end() ? 0.0 : it->second / sum;
    }
    return w;
  }

  static WeightVector equal() {
    WeightVector w;
    w.weights_.fill(1.0 / kQosFields.size());
    return w;
  }

  double weight(QosField f) const {
    return weights_[static_cast<size_t>(f)];
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  WeightVector() { weights_.fill(0); }
  std::array<double, 5> weights_{};
};

using QosRow = std::array<double, 5>;  // one value per kQosFields entry

// Min-max normalization, cost fields inverted; a constant column maps to 1.
inline std::vector<QosRow> normalize(const std::vector<QoSProfile>& candidates) {
  if (candidates.empty()) raise(Errc::empty_candidate_list, "normalize");
  std::vector<QosRow> out(candidates.size());
  for (size_t fi = 0; fi < kQosFields.size(); ++fi) {
    QosField f = kQosFields[fi];
    double lo = candidates[0].get(f), hi = lo;
    for (const auto& q : candidates) {
      lo = std::min(lo, q.get(f));
      hi = std::max(hi, q.get(f));
    }
    for (size_t ci = 0; ci < candidates.size(); ++ci) {
      double v = candidates[ci].get(f);
      double n = hi == lo ? 1.0 : (qos_is_cost(f) ? (hi - v) / (hi - lo) : (v - lo) / (hi - lo));
      out[ci][fi] = n;
    }
  }
  return out;
}

inline double saw_utility(const QosRow& row, const WeightVector& w) {
  double u = 0;
  for (size_t fi = 0; fi < kQosFields.size(); ++fi) u += w.weight(kQosFields[fi]) * row[fi];
  return u;
}

struct Ranked {
  MatchResult match;
  double utility = 0;

  friend bool operator==(const Ranked&, const Ranked&) = default;
};

inline std::vector<Ranked> select_rank(const std::vector<std::pair<MatchResult, QoSProfile>>& results,
                                       const WeightVector& w, unsigned k) {
  if (results.empty() || k == 0) return {};
  std::vector<QoSProfile> profiles;
  profiles.reserve(results.size());
  for (const auto& [_, q] : results) profiles.push_back(q);
  auto rows = normalize(profiles);
  std::vector<Ranked> out;
  out.reserve(results.size());
  for (size_t i = 0; i < results.size(); ++i)
    out.push_back({results[i].first, saw_utility(rows[i], w)});
  std::sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.match < b.match;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace fogdisc
