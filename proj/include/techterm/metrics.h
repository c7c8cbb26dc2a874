#ifndef TECHTERM_METRICS_H_
#define TECHTERM_METRICS_H_

#include <cstdint>
#include <string>

#include <json.hpp>

namespace techterm {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts &) const = default;
};

enum class EvalMode { kSentence, kToken, kEndToEnd, kSpan };

const char *mode_name(EvalMode mode);
// Throws ConfigError for unknown names.
EvalMode parse_mode(const std::string &name);

struct EvalReport {
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  EvalMode mode = EvalMode::kSentence;
};

// precision = tp/(tp+fp), recall = tp/(tp+fn), F = 2PR/(P+R). A zero
// denominator yields 0 for that quantity.
EvalReport f_score(const ConfusionCounts &counts,
                   EvalMode mode = EvalMode::kSentence);

nlohmann::json to_json(const EvalReport &report);
std::string format_table(const EvalReport &report);

}  // namespace techterm

#endif  // TECHTERM_METRICS_H_
