#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace mdobench {

/// Value/gradient call counts for one function tag.
struct CallCounter {
  std::int64_t values = 0;
  std::int64_t gradients = 0;
};

/// Monotone evaluation counters keyed by function tag ("f", "L", "h_1", ...).
///
/// Counters only grow; reset() is for run boundaries. One record belongs to
/// one run — concurrent runs each own their record.
class EvaluationRecord {
 public:
  void count_value(const std::string& tag, std::int64_t n = 1) { counters_[tag].values += n; }
  void count_gradient(const std::string& tag, std::int64_t n = 1) { counters_[tag].gradients += n; }

  std::int64_t values(const std::string& tag) const {
    const auto it = counters_.find(tag);
    return it == counters_.end() ? 0 : it->second.values;
  }
  std::int64_t gradients(const std::string& tag) const {
    const auto it = counters_.find(tag);
    return it == counters_.end() ? 0 : it->second.gradients;
  }

  const std::map<std::string, CallCounter>& counters() const { return counters_; }

  void reset() { counters_.clear(); }

 private:
  std::map<std::string, CallCounter> counters_;
};

}  // namespace mdobench
