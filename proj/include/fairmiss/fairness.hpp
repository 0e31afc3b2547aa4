#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fairmiss {

/// A conditional rate whose denominator may be empty. An undefined rate
/// propagates as a missing metric value, never as 0.
using MaybeRate = std::optional<double>;

/// Exact count-based rates per sensitive group (0 = unprivileged,
/// 1 = privileged).
struct GroupRates {
  struct PerGroup {
    std::int64_t n = 0;
    std::int64_t positives = 0;        // Y = 1
    std::int64_t pred_positives = 0;   // Yhat = 1
    std::int64_t true_positives = 0;   // Yhat = 1, Y = 1
    std::int64_t false_positives = 0;  // Yhat = 1, Y = 0

    MaybeRate base_rate() const { return ratio(positives, n); }
    MaybeRate positive_prediction_rate() const { return ratio(pred_positives, n); }
    MaybeRate true_positive_rate() const { return ratio(true_positives, positives); }
    MaybeRate false_positive_rate() const {
      return ratio(false_positives, n - positives);
    }

   private:
    static MaybeRate ratio(std::int64_t num, std::int64_t den) {
      if (den <= 0) return std::nullopt;
      return static_cast<double>(num) / static_cast<double>(den);
    }
  };
  PerGroup group[2];
};

/// Tallies confusion counts per group from binary label vectors.
inline GroupRates group_rates(const std::vector<int>& y_true,
                              const std::vector<int>& y_pred,
                              const std::vector<int>& sensitive) {
  if (y_true.size() != y_pred.size() || y_true.size() != sensitive.size())
    throw std::invalid_argument("group_rates: length mismatch");
  GroupRates r;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int s = sensitive[i];
    const int y = y_true[i];
    const int yh = y_pred[i];
    if ((s != 0 && s != 1) || (y != 0 && y != 1) || (yh != 0 && yh != 1))
      throw std::invalid_argument("group_rates: vectors must be binary");
    auto& g = r.group[s];
    g.n += 1;
    g.positives += y;
    g.pred_positives += yh;
    g.true_positives += y & yh;
    g.false_positives += (1 - y) & yh;
  }
  if (r.group[0].n == 0 || r.group[1].n == 0)
    throw std::invalid_argument("group_rates: a sensitive group is empty");
  return r;
}

inline MaybeRate signed_difference(MaybeRate privileged, MaybeRate unprivileged) {
  if (!privileged || !unprivileged) return std::nullopt;
  return *privileged - *unprivileged;
}

/// Difference in positive-prediction rates, privileged minus unprivileged.
/// Negative values favor the unprivileged group.
inline MaybeRate demographic_parity(const GroupRates& r) {
  return signed_difference(r.group[1].positive_prediction_rate(),
                           r.group[0].positive_prediction_rate());
}

/// Difference in true positive rates between the groups.
inline MaybeRate equality_of_opportunity(const GroupRates& r) {
  return signed_difference(r.group[1].true_positive_rate(),
                           r.group[0].true_positive_rate());
}

/// Difference in false positive rates between the groups.
inline MaybeRate predictive_equality(const GroupRates& r) {
  return signed_difference(r.group[1].false_positive_rate(),
                           r.group[0].false_positive_rate());
}

inline double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (y_true.empty()) throw std::invalid_argument("accuracy: empty vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

}  // namespace fairmiss
