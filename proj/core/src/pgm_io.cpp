#include "wirepick/pgm_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "wirepick/errors.hpp"

namespace wirepick::grasp {
namespace {

struct PgmRaster {
  int width = 0, height = 0, maxval = 0;
  std::vector<int> values;
  std::string comment;  // concatenated comment text
};

PgmRaster read_p2(std::istream& in) {
  PgmRaster r;
  std::vector<std::string> tokens;
  std::string line;
  // header tokens may be interleaved with comment lines
  auto next_token = [&](std::string& tok) -> bool {
    while (true) {
      if (!(in >> std::ws)) return false;
      if (in.peek() == '#') {
        std::getline(in, line);
        if (!r.comment.empty()) r.comment += ' ';
        const auto text = line.find_first_not_of(' ', 1);
        if (text != std::string::npos) r.comment += line.substr(text);
        continue;
      }
      return static_cast<bool>(in >> tok);
    }
  };
  std::string tok;
  if (!next_token(tok) || tok != "P2") throw FormatError("not an ASCII PGM (P2) file");
  auto read_int = [&](const char* what) {
    if (!next_token(tok)) throw FormatError(std::string("PGM: missing ") + what);
    try {
      std::size_t pos = 0;
      int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw FormatError("");
      return v;
    } catch (const std::exception&) {
      throw FormatError(std::string("PGM: bad ") + what + " '" + tok + "'");
    }
  };
  r.width = read_int("width");
  r.height = read_int("height");
  r.maxval = read_int("maxval");
  if (r.width <= 0 || r.height <= 0 || r.maxval <= 0 || r.maxval > 65535)
    throw FormatError("PGM: invalid header");
  r.values.reserve(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  for (int i = 0; i < r.width * r.height; ++i) {
    int v = read_int("pixel");
    if (v < 0 || v > r.maxval) throw FormatError("PGM: pixel outside [0, maxval]");
    r.values.push_back(v);
  }
  return r;
}

double comment_value(const std::string& comment, const std::string& key, double fallback) {
  std::istringstream ss(comment);
  std::string word;
  while (ss >> word) {
    if (word == key) {
      double v;
      if (ss >> v) return v;
      throw FormatError("PGM comment: bad value for " + key);
    }
  }
  return fallback;
}

void write_p2(std::ostream& out, int w, int h, int maxval, const std::vector<int>& values,
              const std::string& comment) {
  out << "P2\n";
  if (!comment.empty()) out << "# " << comment << '\n';
  out << w << ' ' << h << '\n' << maxval << '\n';
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x) out << ' ';
      out << values[static_cast<std::size_t>(y * w + x)];
    }
    out << '\n';
  }
}

std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_depth_pgm(std::ostream& out, const DepthMap& depth, double height_unit) {
  if (!(height_unit > 0.0)) throw ParameterError("height_unit must be positive");
  std::vector<int> values;
  values.reserve(depth.data.size());
  int maxval = 1;
  for (double h : depth.data) {
    const long q = std::lround(h / height_unit);
    if (q < 0 || q > 65535) throw ParameterError("height not representable in 16-bit PGM");
    values.push_back(static_cast<int>(q));
    maxval = std::max(maxval, static_cast<int>(q));
  }
  write_p2(out, depth.width, depth.height, maxval, values,
           "resolution " + fmt(depth.resolution) + " height_unit " + fmt(height_unit) +
               " bin_depth " + fmt(depth.bin_depth));
}

DepthMap read_depth_pgm(std::istream& in) {
  const auto r = read_p2(in);
  DepthMap m;
  m.width = r.width;
  m.height = r.height;
  m.resolution = comment_value(r.comment, "resolution", 0.005);
  const double unit = comment_value(r.comment, "height_unit", 1e-4);
  m.bin_depth = comment_value(r.comment, "bin_depth", 0.5);
  m.data.reserve(r.values.size());
  for (int v : r.values) m.data.push_back(v * unit);
  return m;
}

void write_mask_pgm(std::ostream& out, const Mask& mask, const std::string& comment) {
  std::vector<int> values(mask.bits.begin(), mask.bits.end());
  for (auto& v : values) v = v ? 1 : 0;
  write_p2(out, mask.width, mask.height, 1, values, comment);
}

Mask read_mask_pgm(std::istream& in, std::string* comment) {
  const auto r = read_p2(in);
  Mask m;
  m.width = r.width;
  m.height = r.height;
  m.bits.reserve(r.values.size());
  for (int v : r.values) m.bits.push_back(v > 0 ? 1 : 0);
  if (comment) *comment = r.comment;
  return m;
}

GripperTemplate load_template(const std::string& contact_path, const std::string& collision_path) {
  std::ifstream a(contact_path), b(collision_path);
  if (!a) throw FormatError("cannot open '" + contact_path + "'");
  if (!b) throw FormatError("cannot open '" + collision_path + "'");
  GripperTemplate t;
  std::string comment;
  t.contact = read_mask_pgm(a, &comment);
  t.collision = read_mask_pgm(b);
  t.open_width = comment_value(comment, "open_width", t.open_width);
  t.finger_depth = comment_value(comment, "finger_depth", t.finger_depth);
  t.validate();
  return t;
}

void save_template(const GripperTemplate& tmpl, const std::string& contact_path,
                   const std::string& collision_path) {
  std::ofstream a(contact_path), b(collision_path);
  if (!a || !b) throw FormatError("cannot write template masks");
  write_mask_pgm(a, tmpl.contact,
                 "open_width " + fmt(tmpl.open_width) + " finger_depth " + fmt(tmpl.finger_depth));
  write_mask_pgm(b, tmpl.collision);
}

DepthMap load_depth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_depth_pgm(in);
}

void save_depth(const std::string& path, const DepthMap& depth, double height_unit) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write_depth_pgm(out, depth, height_unit);
}

void write_candidates_csv(std::ostream& out, const std::vector<GraspCandidate>& candidates) {
  out << "u,v,rotation,height,score,mid_bias\n";
  for (const auto& c : candidates)
    out << c.u << ',' << c.v << ',' << fmt(c.rotation) << ',' << fmt(c.grasp_height) << ','
        << fmt(c.score) << ',' << fmt(c.mid_bias) << '\n';
}

}  // namespace wirepick::grasp
