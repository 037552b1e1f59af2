#include "flowdecomp/zones.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "flowdecomp/errors.hpp"

namespace flowdecomp {

std::string to_string(Zone zone) {
  switch (zone) {
    case Zone::Red: return "red";
    case Zone::Yellow: return "yellow";
    case Zone::Green: return "green";
  }
  return "?";
}

std::string to_string(ZoneMode mode) {
  return mode == ZoneMode::Fixed ? "fixed" : "shrinking";
}

ZoneMode parse_zone_mode(const std::string& text) {
  if (text == "fixed") return ZoneMode::Fixed;
  if (text == "shrinking") return ZoneMode::Shrinking;
  throw InvalidArgument("unknown zone mode '" + text + "' (expected fixed or shrinking)");
}

void ZoneConfig::validate() const {
  if (!(0.0 < delta_red && delta_red < delta_green)) {
    throw InvalidArgument("zone thresholds must satisfy 0 < delta_red < delta_green");
  }
  if (!(0.0 < rho && rho < 1.0)) throw InvalidArgument("shrink ratio must lie in (0, 1)");
  if (!(epsilon > 0.0) || !(a > 0.0)) throw InvalidArgument("budgets epsilon and a must be positive");
  if (slack < 0.0) throw InvalidArgument("slack must be non-negative");
}

double ZoneConfig::red_threshold(int k) const {
  return mode == ZoneMode::Shrinking ? delta_red * std::pow(rho, k) : delta_red;
}

double ZoneConfig::green_threshold(int k) const {
  return mode == ZoneMode::Shrinking ? delta_green * std::pow(rho, k) : delta_green;
}

double ZoneConfig::duration_budget(int interval) const { return a / std::pow(2.0, interval); }

Zone zone_of(double det, const ZoneConfig& cfg, int k) {
  const double m = std::abs(det);
  if (m <= cfg.red_threshold(k)) return Zone::Red;
  if (m >= cfg.green_threshold(k)) return Zone::Green;
  return Zone::Yellow;
}

double FreezeInterval::duration(double horizon) const {
  const double stop = open() ? horizon : std::min(*end, horizon);
  return std::max(0.0, stop - start);
}

const FreezeInterval* StoppingTimes::find(double t) const {
  // intervals are ordered and disjoint
  auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                             [](double v, const FreezeInterval& iv) { return v < iv.start; });
  if (it == intervals.begin()) return nullptr;
  --it;
  return it->contains(t) ? &*it : nullptr;
}

int StoppingTimes::active_index(double t) const {
  int next = 1;
  for (const auto& iv : intervals) {
    if (iv.contains(t) || iv.start > t) return iv.index;
    next = iv.index + 1;
  }
  return next;
}

namespace {

// On a segment [ta, tb] with det linear from da (at ta) to db (at tb), the
// first time t >= from at which |det(t)| <= r.
std::optional<double> first_red(double ta, double tb, double da, double db, double from,
                                double r) {
  const double len = tb - ta;
  const double lam0 = len > 0.0 ? (from - ta) / len : 0.0;
  const double d0 = da + lam0 * (db - da);
  if (std::abs(d0) <= r) return from;
  double lam;
  if (d0 > r) {
    if (db > r) return std::nullopt;
    lam = (da - r) / (da - db);
  } else {
    if (db < -r) return std::nullopt;
    lam = (-r - da) / (db - da);
  }
  return std::max(from, ta + std::clamp(lam, 0.0, 1.0) * len);
}

// First time t >= from on the segment at which |det(t)| >= g.
std::optional<double> first_green(double ta, double tb, double da, double db, double from,
                                  double g) {
  const double len = tb - ta;
  const double lam0 = len > 0.0 ? (from - ta) / len : 0.0;
  const double d0 = da + lam0 * (db - da);
  if (std::abs(d0) >= g) return from;
  double lam;
  if (db >= g) {
    lam = (g - da) / (db - da);
  } else if (db <= -g) {
    lam = (-g - da) / (db - da);
  } else {
    return std::nullopt;
  }
  return std::max(from, ta + std::clamp(lam, 0.0, 1.0) * len);
}

}  // namespace

StoppingTimes detect_stopping_times(std::span<const double> times, std::span<const double> dets,
                                    const ZoneConfig& cfg, double horizon) {
  cfg.validate();
  if (times.size() != dets.size() || times.empty()) {
    throw InvalidArgument("det series must be non-empty and aligned with the time grid");
  }

  StoppingTimes out;
  int index = 1;
  bool frozen = false;

  auto open_interval = [&](double t) {
    FreezeInterval iv;
    iv.index = index;
    iv.start = t;
    iv.red_threshold = cfg.red_threshold(index - 1);
    iv.green_threshold = cfg.green_threshold(index - 1);
    out.intervals.push_back(iv);
    frozen = true;
  };

  if (std::abs(dets[0]) <= cfg.red_threshold(0)) open_interval(times[0]);

  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double ta = times[j];
    if (ta >= horizon) break;
    const double tb = std::min(times[j + 1], horizon);
    const double da = dets[j];
    // re-interpolate the right end if the horizon cuts the segment
    const double db = times[j + 1] > horizon
                          ? da + (dets[j + 1] - da) * (tb - ta) / (times[j + 1] - ta)
                          : dets[j + 1];
    double cursor = ta;
    for (;;) {
      if (!frozen) {
        const auto t = first_red(ta, tb, da, db, cursor, cfg.red_threshold(index - 1));
        if (!t) break;
        open_interval(*t);
        cursor = *t;
      } else {
        auto& iv = out.intervals.back();
        const auto t = first_green(ta, tb, da, db, cursor, iv.green_threshold);
        if (!t) break;
        frozen = false;
        ++index;
        if (*t <= iv.start) {
          // entry and exit rounded to the same time on a steep segment; |det|
          // is moving outward, so nothing else happens on this segment
          iv.end = std::nextafter(iv.start, horizon + 1.0);
          break;
        }
        iv.end = *t;
        cursor = *t;
      }
    }
  }
  return out;
}

double discrepancy_measure(const StoppingTimes& times, double horizon) {
  double total = 0.0;
  for (const auto& iv : times.intervals) total += iv.duration(horizon);
  return total;
}

// ---------------------------------------------------------------------------

FrozenDriver::FrozenDriver(std::shared_ptr<const DriverPath> base, StoppingTimes times)
    : base_(std::move(base)), times_(std::move(times)) {
  if (!base_ || base_->values.empty()) throw InvalidArgument("frozen driver needs a base path");
  double previous_end = 0.0;
  for (const auto& iv : times_.intervals) {
    if (iv.start < previous_end || iv.start > base_->horizon() ||
        (iv.end && !(*iv.end > iv.start))) {
      throw InvalidArgument("stopping times must alternate and lie within the driver horizon");
    }
    frozen_values_.push_back(base_->value_at(iv.start));
    if (iv.end) {
      jumps_.push_back({*iv.end, iv.index, base_->value_at(*iv.end) - frozen_values_.back()});
      previous_end = *iv.end;
    } else {
      previous_end = base_->horizon();
    }
  }
}

Vec FrozenDriver::value_at_grid(std::size_t j) const {
  const double t = base_->grid.at(j);
  if (const FreezeInterval* iv = times_.find(t)) {
    return frozen_values_[static_cast<std::size_t>(iv - times_.intervals.data())];
  }
  return base_->values[j];
}

Vec FrozenDriver::value_at(double t) const {
  if (const FreezeInterval* iv = times_.find(t)) {
    return frozen_values_[static_cast<std::size_t>(iv - times_.intervals.data())];
  }
  return base_->value_at(t);
}

FrozenDriver freeze_driver(const DriverPath& driver, const StoppingTimes& times) {
  return FrozenDriver(std::make_shared<const DriverPath>(driver), times);
}

}  // namespace flowdecomp
