#include "wirepick/sim_world.hpp"

#include <stdexcept>
#include <tuple>

namespace wirepick::sim {

SimulatedWorld::SimulatedWorld(BinState state)
    : world_(std::move(state)),
      gripper_(grasp::make_parallel_jaw_template(world_.config.camera_resolution())) {}

int SimulatedWorld::held_id() const {
  if (!world_.held) throw std::logic_error("gripper is empty");
  return *world_.held;
}

grasp::DepthMap SimulatedWorld::capture_depth() {
  const int px = world_.config.camera_pixels;
  view_ = render(world_, px, px, world_.config.camera_resolution());
  return view_->depth;
}

bool SimulatedWorld::execute_grasp(const grasp::GraspCandidate& candidate) {
  if (world_.held) throw std::logic_error("gripper already holds an object");
  int id = -1;
  double s = 0.0;
  if (forced_grasp_) {
    std::tie(id, s) = *forced_grasp_;
    forced_grasp_.reset();
  } else {
    if (!view_) capture_depth();
    if (!view_->depth.contains(candidate.u, candidate.v)) return false;
    const auto idx = static_cast<std::size_t>(candidate.v) * view_->depth.width + candidate.u;
    id = view_->label[idx];
    s = view_->label_s[idx];
  }
  if (id < 0 || !world_.contains(id)) return false;
  view_.reset();
  return attempt_grasp(world_, id, s);
}

ForceTrace SimulatedWorld::lift() { return synth_lift_trace(world_, held_id()); }

PickingWorld::SwingReport SimulatedWorld::swing(const SwingParams& params) {
  const auto out = apply_swing(world_, held_id(), params);
  if (!out.ejected_ids.empty() || out.slipped) view_.reset();
  return {out.slipped, out.edges_broken, static_cast<int>(out.ejected_ids.size())};
}

PickingWorld::RegraspReport SimulatedWorld::regrasp() {
  const auto out = apply_regrasp_physics(world_, held_id());
  if (!out.handoff_ok) view_.reset();
  return {out.torque_a, out.torque_b, out.handoff_ok};
}

ForceTrace SimulatedWorld::transport() { return synth_transport_trace(world_, held_id()); }

int SimulatedWorld::release_to_goal() {
  view_.reset();
  return deliver(world_, held_id());
}

void SimulatedWorld::release_to_bin() {
  view_.reset();
  drop_into_bin(world_);
}

}  // namespace wirepick::sim
