#pragma once

// Green / yellow / red classification of the decomposability determinant,
// hysteresis stopping times, and the frozen driver built from them.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowdecomp/linalg.hpp"
#include "flowdecomp/sde.hpp"

namespace flowdecomp {

enum class Zone { Red = 0, Yellow = 1, Green = 2 };
enum class ZoneMode { Fixed, Shrinking };

std::string to_string(Zone zone);
std::string to_string(ZoneMode mode);
ZoneMode parse_zone_mode(const std::string& text);

struct ZoneConfig {
  double delta_red = 0.05;
  double delta_green = 0.2;
  /// Geometric shrink ratio of the thresholds in shrinking mode.
  double rho = 0.5;
  double epsilon = 0.1;
  double a = 0.5;
  /// Allowed shortfall of |det| below the red threshold at an interpolated
  /// freeze time.
  double slack = 1e-4;
  ZoneMode mode = ZoneMode::Fixed;

  void validate() const;

  /// Thresholds for zone level k >= 0 (level k is used by freeze interval k+1).
  double red_threshold(int k) const;
  double green_threshold(int k) const;
  /// Duration budget a / 2^i of freeze interval i >= 1.
  double duration_budget(int interval) const;
};

/// Red if |d| <= red(k), green if |d| >= green(k), yellow between.
Zone zone_of(double det, const ZoneConfig& cfg, int k);

struct FreezeInterval {
  int index = 1;  // 1-based
  double start = 0.0;
  std::optional<double> end;  // empty: still frozen at the horizon
  double red_threshold = 0.0;
  double green_threshold = 0.0;

  bool open() const noexcept { return !end.has_value(); }
  bool contains(double t) const noexcept { return t >= start && (open() || t < *end); }
  double duration(double horizon) const;
};

struct StoppingTimes {
  std::vector<FreezeInterval> intervals;

  bool empty() const noexcept { return intervals.empty(); }
  const FreezeInterval* find(double t) const;
  bool frozen_at(double t) const { return find(t) != nullptr; }
  /// 1-based index of the freeze interval in force at time t: the current one,
  /// or the next one to come.
  int active_index(double t) const;
  double active_red_threshold(double t, const ZoneConfig& cfg) const {
    return cfg.red_threshold(active_index(t) - 1);
  }
};

/// Scans the det series (linear between grid times) for the alternating
/// entries into red (T_i) and returns into green (T-bar_i).
StoppingTimes detect_stopping_times(std::span<const double> times, std::span<const double> dets,
                                    const ZoneConfig& cfg, double horizon);

/// Lebesgue measure of the freeze set truncated at the horizon.
double discrepancy_measure(const StoppingTimes& times, double horizon);

struct JumpRecord {
  double time = 0.0;
  int interval = 0;
  Vec increment;  // U(T-bar_k) - U(T_k)
};

/// Z_t: equal to U_t outside the freeze intervals, held at U(T_k) inside
/// [T_k, T-bar_k), jumping back at T-bar_k.
class FrozenDriver {
 public:
  FrozenDriver(std::shared_ptr<const DriverPath> base, StoppingTimes times);

  const DriverPath& base() const noexcept { return *base_; }
  const StoppingTimes& stopping_times() const noexcept { return times_; }
  const std::vector<JumpRecord>& jumps() const noexcept { return jumps_; }
  const Vec& frozen_value(std::size_t interval_pos) const { return frozen_values_.at(interval_pos); }

  /// Z at grid index j: a copy of the stored U_j when not frozen.
  Vec value_at_grid(std::size_t j) const;
  Vec value_at(double t) const;
  bool frozen_at(double t) const { return times_.frozen_at(t); }

 private:
  std::shared_ptr<const DriverPath> base_;
  StoppingTimes times_;
  std::vector<Vec> frozen_values_;
  std::vector<JumpRecord> jumps_;
};

FrozenDriver freeze_driver(const DriverPath& driver, const StoppingTimes& times);

}  // namespace flowdecomp
