#include "gpprior/errors.hpp"

#include <cstdio>

namespace gpprior {

namespace {

std::string join_jitters(const std::vector<double>& jitters) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < jitters.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.3g", jitters[i]);
    if (i) out += ", ";
    out += buf;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

NonPositiveDefinite::NonPositiveDefinite(std::vector<double> jitters)
    : NumericalError("matrix is not positive definite after jitter levels [" +
                     join_jitters(jitters) + "]"),
      jitters_(std::move(jitters)) {}

AllRestartsFailed::AllRestartsFailed(std::vector<std::string> statuses)
    : NumericalError("all restarts failed: [" + join(statuses) + "]"),
      statuses_(std::move(statuses)) {}

}  // namespace gpprior
