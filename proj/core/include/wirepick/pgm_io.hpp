#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wirepick/grasp.hpp"

namespace wirepick::grasp {

// ASCII PGM (P2). Heights are stored as integers in units of `height_unit` meters;
// a comment line carries "resolution <m/px> height_unit <m> bin_depth <m>".
void write_depth_pgm(std::ostream& out, const DepthMap& depth, double height_unit = 1e-4);
DepthMap read_depth_pgm(std::istream& in);

// Binary masks as P2 with maxval 1. The contact mask's comment carries
// "open_width <m> finger_depth <m>".
void write_mask_pgm(std::ostream& out, const Mask& mask, const std::string& comment = {});
Mask read_mask_pgm(std::istream& in, std::string* comment = nullptr);

GripperTemplate load_template(const std::string& contact_path, const std::string& collision_path);
void save_template(const GripperTemplate& tmpl, const std::string& contact_path,
                   const std::string& collision_path);

DepthMap load_depth(const std::string& path);
void save_depth(const std::string& path, const DepthMap& depth, double height_unit = 1e-4);

// CSV with header u,v,rotation,height,score,mid_bias.
void write_candidates_csv(std::ostream& out, const std::vector<GraspCandidate>& candidates);

}  // namespace wirepick::grasp
