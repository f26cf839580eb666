#include "fastfrechet/bench.hpp"

#include "fastfrechet/errors.hpp"

#include <algorithm>
#include <chrono>

namespace fastfrechet {

double median(std::vector<double> values) {
  if (values.empty()) {
    throw InvalidArgument("median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) {
    return values[mid];
  }
  return 0.5 * (values[mid - 1] + values[mid]);
}

BenchReport measure(const std::string& name, const std::function<double()>& task,
                    std::size_t reps, std::map<std::string, std::string> parameters) {
  if (reps < 1) {
    throw InvalidArgument("bench reps must be at least 1");
  }
  using Clock = std::chrono::steady_clock;

  BenchReport report;
  report.task = name;
  report.reps = reps;
  report.parameters = std::move(parameters);

  volatile double sink = task();  // warm-up, untimed
  report.times.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    const double checksum = task();
    const auto stop = Clock::now();
    sink = checksum;
    report.checksum += checksum;
    report.times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  (void)sink;
  report.median = median(report.times);
  return report;
}

nlohmann::ordered_json to_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  j["task"] = report.task;
  j["reps"] = report.reps;
  j["median"] = report.median;
  j["times"] = report.times;
  j["checksum"] = report.checksum;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.parameters) {
    params[key] = value;
  }
  j["parameters"] = std::move(params);
  return j;
}

}  // namespace fastfrechet
