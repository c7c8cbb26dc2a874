#include "techterm/metrics.h"

#include <cstdio>

#include "techterm/error.h"

namespace techterm {

const char *mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::kSentence:
      return "sentence";
    case EvalMode::kToken:
      return "token";
    case EvalMode::kEndToEnd:
      return "end_to_end";
    case EvalMode::kSpan:
      return "span";
  }
  return "unknown";
}

EvalMode parse_mode(const std::string &name) {
  for (EvalMode m : {EvalMode::kSentence, EvalMode::kToken, EvalMode::kEndToEnd,
                     EvalMode::kSpan}) {
    if (name == mode_name(m)) return m;
  }
  throw ConfigError("unknown evaluation mode '" + name + "'");
}

EvalReport f_score(const ConfusionCounts &counts, EvalMode mode) {
  EvalReport r;
  r.counts = counts;
  r.mode = mode;
  const auto tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fp > 0) r.precision = tp / static_cast<double>(counts.tp + counts.fp);
  if (counts.tp + counts.fn > 0) r.recall = tp / static_cast<double>(counts.tp + counts.fn);
  if (r.precision + r.recall > 0.0) {
    r.f_score = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

nlohmann::json to_json(const EvalReport &r) {
  return {{"mode", mode_name(r.mode)},   {"tp", r.counts.tp},
          {"fp", r.counts.fp},           {"tn", r.counts.tn},
          {"fn", r.counts.fn},           {"precision", r.precision},
          {"recall", r.recall},          {"f_score", r.f_score}};
}

std::string format_table(const EvalReport &r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "mode        tp        fp        tn        fn   precision  recall  f-score\n"
                "%-10s %9llu %9llu %9llu %9llu   %.4f     %.4f  %.4f\n",
                mode_name(r.mode), static_cast<unsigned long long>(r.counts.tp),
                static_cast<unsigned long long>(r.counts.fp),
                static_cast<unsigned long long>(r.counts.tn),
                static_cast<unsigned long long>(r.counts.fn), r.precision,
                r.recall, r.f_score);
  return buf;
}

}  // namespace techterm
