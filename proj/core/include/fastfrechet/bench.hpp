#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fastfrechet {

struct BenchReport {
  std::string task;
  std::size_t reps = 0;
  /// Wall-clock seconds per timed run, in execution order.
  std::vector<double> times;
  double median = 0.0;
  /// Sum of the checksums returned by the timed runs.
  double checksum = 0.0;
  std::map<std::string, std::string> parameters;
};

/// Exact sample median; averages the two middle values for even sizes.
double median(std::vector<double> values);

/// Runs `task` once untimed, then `reps` timed runs on a monotonic clock.
/// The task returns a checksum of its result; checksums are accumulated into
/// the report so the computation cannot be discarded as dead code.
BenchReport measure(const std::string& name, const std::function<double()>& task,
                    std::size_t reps = 15, std::map<std::string, std::string> parameters = {});

nlohmann::ordered_json to_json(const BenchReport& report);

}  // namespace fastfrechet
