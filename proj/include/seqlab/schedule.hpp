#pragma once

// Learning-rate schedule engine: cosine annealing with warm restarts, linear
// warmup and early stopping, as a pure state machine. A training loop calls
// lr_at() for every step and observe_validation() once per epoch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "seqlab/error.hpp"

namespace seqlab {

enum class Preset { Original, Stable, Adaptive };

inline std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::Original: return "original";
    case Preset::Stable: return "stable";
    case Preset::Adaptive: return "adaptive";
  }
  return "?";
}

struct ScheduleConfig {
  double max_lr = 2e-5;
  double min_lr = 0.0;
  int restart_period_initial = 1;  // epochs in the first cycle
  double restart_period_mult = 1.0;
  int max_epochs = 1;
  bool early_stopping = true;
  int early_stop_patience = 0;
  double early_stop_min_delta = 0.0;
  double warmup_fraction = 0.0;  // of the first cycle
  int steps_per_epoch = 1;
  std::optional<Preset> preset;

  void check() const {
    auto fail = [](const std::string& what) {
      throw Error(ErrorCode::InvalidConfig, what);
    };
    if (!(max_lr > 0.0) || !std::isfinite(max_lr)) fail("max_lr must be > 0");
    if (!(min_lr >= 0.0) || min_lr > max_lr) fail("need 0 <= min_lr <= max_lr");
    if (restart_period_initial < 1) fail("restart_period_initial must be >= 1");
    if (!(restart_period_mult >= 1.0) || !std::isfinite(restart_period_mult))
      fail("restart_period_mult must be >= 1");
    if (max_epochs < 1) fail("max_epochs must be >= 1");
    if (early_stop_patience < 0) fail("early_stop_patience must be >= 0");
    if (!(early_stop_min_delta >= 0.0)) fail("early_stop_min_delta must be >= 0");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
      fail("warmup_fraction must be in [0,1)");
    if (steps_per_epoch < 1) fail("steps_per_epoch must be >= 1");
  }
};

struct ScheduleState {
  int epoch = 0;               // completed epochs
  int position_in_cycle = 0;   // T_cur, epochs into the current cycle
  int cycle_length = 1;        // T_i
  int restart_index = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
  bool stopped = false;

  static ScheduleState initial(const ScheduleConfig& cfg) {
    ScheduleState s;
    s.cycle_length = cfg.restart_period_initial;
    return s;
  }
};

// Recipes after the cited presets: BERT fine-tuning (short run, 10% warmup,
// decay to zero), the stability study's longer low-LR run, and the adaptive
// early-stopping + warm-restart schedule. Edit freely.
inline ScheduleConfig from_preset(Preset preset) {
  ScheduleConfig c;
  c.preset = preset;
  switch (preset) {
    case Preset::Original:
      c.max_lr = 5e-5;
      c.min_lr = 0.0;
      c.max_epochs = 3;
      c.restart_period_initial = 3;
      c.restart_period_mult = 1.0;
      c.early_stopping = false;
      c.early_stop_patience = 0;
      c.warmup_fraction = 0.1;
      break;
    case Preset::Stable:
      c.max_lr = 2e-5;
      c.min_lr = 0.0;
      c.max_epochs = 20;
      c.restart_period_initial = 20;
      c.restart_period_mult = 1.0;
      c.early_stopping = false;
      c.early_stop_patience = 0;
      c.warmup_fraction = 0.1;
      break;
    case Preset::Adaptive:
      c.max_lr = 2e-5;
      c.min_lr = 0.0;
      c.max_epochs = 250;
      c.restart_period_initial = 5;
      c.restart_period_mult = 2.0;
      c.early_stopping = true;
      c.early_stop_patience = 3;
      c.early_stop_min_delta = 0.0;
      c.warmup_fraction = 0.1;
      break;
  }
  return c;
}

inline Preset preset_from_string(std::string_view name) {
  if (name == "original") return Preset::Original;
  if (name == "stable") return Preset::Stable;
  if (name == "adaptive") return Preset::Adaptive;
  throw Error(ErrorCode::UnknownPreset, "'" + std::string(name) + "'");
}

inline ScheduleConfig from_preset(std::string_view name) {
  return from_preset(preset_from_string(name));
}

/// Learning rate at `step` (0-based, < steps_per_epoch) of the current epoch.
/// Within a cycle: min + ½(max − min)(1 + cos(π·t/T_i)); the first cycle
/// opens with a linear ramp from min_lr over warmup_fraction of its length.
inline double lr_at(const ScheduleState& state, const ScheduleConfig& cfg, int step = 0) {
  if (state.stopped) throw Error(ErrorCode::Stopped, "schedule has stopped");
  const double t = state.position_in_cycle +
                   static_cast<double>(step) / static_cast<double>(cfg.steps_per_epoch);
  const double period = state.cycle_length;
  const double span = cfg.max_lr - cfg.min_lr;
  double progress = t / period;
  if (state.restart_index == 0 && cfg.warmup_fraction > 0.0) {
    const double warmup = cfg.warmup_fraction * period;
    if (t < warmup) return std::clamp(cfg.min_lr + span * t / warmup, cfg.min_lr, cfg.max_lr);
    progress = (t - warmup) / (period - warmup);
  }
  const double lr = cfg.min_lr + 0.5 * span * (1.0 + std::cos(std::numbers::pi * progress));
  return std::clamp(lr, cfg.min_lr, cfg.max_lr);
}

/// Closes one epoch. A loss counts as an improvement iff it is strictly
/// below best − min_delta. Stops once patience is exhausted
/// (epochs_since_improvement ≥ patience) or max_epochs is reached.
inline ScheduleState observe_validation(ScheduleState state, const ScheduleConfig& cfg,
                                        double val_loss) {
  if (state.stopped) throw Error(ErrorCode::Stopped, "schedule has stopped");
  if (!std::isfinite(val_loss))
    throw Error(ErrorCode::NonFiniteLoss, "validation loss is not finite");
  if (val_loss < state.best_val_loss - cfg.early_stop_min_delta) {
    state.best_val_loss = val_loss;
    state.epochs_since_improvement = 0;
  } else {
    ++state.epochs_since_improvement;
  }
  ++state.epoch;
  ++state.position_in_cycle;
  if (state.position_in_cycle >= state.cycle_length) {
    state.position_in_cycle = 0;
    state.cycle_length = std::max(
        1, static_cast<int>(std::lround(state.cycle_length * cfg.restart_period_mult)));
    ++state.restart_index;
  }
  if ((cfg.early_stopping && state.epochs_since_improvement >= cfg.early_stop_patience) ||
      state.epoch >= cfg.max_epochs)
    state.stopped = true;
  return state;
}

struct TrajectoryRow {
  int epoch = 0;  // 1-based
  double lr = 0.0;  // rate used during the epoch (its first step)
  bool stopped = false;
  bool restarted = false;  // a new cycle begins after this epoch
};

inline std::vector<TrajectoryRow> simulate(const ScheduleConfig& cfg,
                                           std::span<const double> val_losses) {
  cfg.check();
  if (val_losses.empty()) throw Error(ErrorCode::InvalidConfig, "no validation losses");
  std::vector<TrajectoryRow> rows;
  auto state = ScheduleState::initial(cfg);
  for (double loss : val_losses) {
    TrajectoryRow row;
    row.lr = lr_at(state, cfg);
    const auto restarts_before = state.restart_index;
    state = observe_validation(state, cfg, loss);
    row.epoch = state.epoch;
    row.stopped = state.stopped;
    row.restarted = state.restart_index != restarts_before;
    rows.push_back(row);
    if (state.stopped) break;
  }
  return rows;
}

inline void write_csv(std::ostream& out, std::span<const TrajectoryRow> rows) {
  out << "epoch,lr,stopped\n";
  const auto old = out.precision(17);
  for (const auto& r : rows)
    out << r.epoch << ',' << r.lr << ',' << (r.stopped ? "true" : "false") << '\n';
  out.precision(old);
}

// ---------------------------------------------------------------------------
// JSON

/// A config object may name a "preset" and override any of its fields.
inline ScheduleConfig schedule_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object");
  ScheduleConfig c;
  try {
    if (j.contains("preset")) c = from_preset(j.at("preset").get<std::string>());
    auto read = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    read("max_lr", c.max_lr);
    read("min_lr", c.min_lr);
    read("restart_period_initial", c.restart_period_initial);
    read("restart_period_mult", c.restart_period_mult);
    read("max_epochs", c.max_epochs);
    read("early_stopping", c.early_stopping);
    read("early_stop_patience", c.early_stop_patience);
    read("early_stop_min_delta", c.early_stop_min_delta);
    read("warmup_fraction", c.warmup_fraction);
    read("steps_per_epoch", c.steps_per_epoch);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.check();
  return c;
}

inline nlohmann::json to_json(const ScheduleConfig& c) {
  nlohmann::json j = {{"max_lr", c.max_lr},
                      {"min_lr", c.min_lr},
                      {"restart_period_initial", c.restart_period_initial},
                      {"restart_period_mult", c.restart_period_mult},
                      {"max_epochs", c.max_epochs},
                      {"early_stopping", c.early_stopping},
                      {"early_stop_patience", c.early_stop_patience},
                      {"early_stop_min_delta", c.early_stop_min_delta},
                      {"warmup_fraction", c.warmup_fraction},
                      {"steps_per_epoch", c.steps_per_epoch}};
  if (c.preset) j["preset"] = to_string(*c.preset);
  return j;
}

}  // namespace seqlab
