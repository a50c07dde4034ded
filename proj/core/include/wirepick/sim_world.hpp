#pragma once

#include <optional>
#include <utility>

#include "wirepick/controller.hpp"
#include "wirepick/simulator.hpp"

namespace wirepick::sim {

// Controller-facing adapter over a BinState.
class SimulatedWorld : public PickingWorld {
 public:
  explicit SimulatedWorld(BinState state);
  explicit SimulatedWorld(const WorldConfig& config) : SimulatedWorld(init_world(config)) {}

  BinState& state() { return world_; }
  const BinState& state() const { return world_; }

  // The next execute_grasp closes on this body at s, ignoring the candidate pixel.
  void force_next_grasp(int id, double s) { forced_grasp_ = std::make_pair(id, s); }

  grasp::DepthMap capture_depth() override;
  const grasp::GripperTemplate& gripper() const override { return gripper_; }
  bool execute_grasp(const grasp::GraspCandidate& candidate) override;
  bool holding() const override { return world_.held.has_value(); }
  ForceTrace lift() override;
  SwingReport swing(const SwingParams& params) override;
  RegraspReport regrasp() override;
  ForceTrace transport() override;
  int release_to_goal() override;
  void release_to_bin() override;

 private:
  int held_id() const;

  BinState world_;
  grasp::GripperTemplate gripper_;
  std::optional<RenderResult> view_;  // last capture, invalidated by any change to the bin
  std::optional<std::pair<int, double>> forced_grasp_;
};

}  // namespace wirepick::sim
