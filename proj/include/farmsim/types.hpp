#ifndef FARMSIM_TYPES_HPP_
#define FARMSIM_TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace farmsim {

using Seconds = double;
using TaskId = std::uint64_t;

/// Index of a processing unit. UAVs occupy [0, num_uavs), MEC servers follow.
using UnitId = std::size_t;

enum class TaskType : std::uint8_t { FireDetection = 0, PestDetection = 1, GrowthMonitoring = 2 };

inline constexpr std::size_t kNumTaskTypes = 3;
inline constexpr std::array<TaskType, kNumTaskTypes> kAllTaskTypes = {
    TaskType::FireDetection, TaskType::PestDetection, TaskType::GrowthMonitoring};

enum class UnitKind : std::uint8_t { Uav, Mec };

/// Battery sentinel used for units that are not battery powered.
inline constexpr double kUnlimitedBattery = std::numeric_limits<double>::infinity();

inline constexpr std::size_t index_of(TaskType t) { return static_cast<std::size_t>(t); }

std::string_view to_string(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view s);

/// Raised for invalid configuration values or unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an internal consistency rule of the simulator is broken.
class LogicFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace farmsim

#endif  // FARMSIM_TYPES_HPP_
