// Copyright 2026 The rollover-deepc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDEEPC_PLANT_TRACK_HPP_
#define RDEEPC_PLANT_TRACK_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/util/config.hpp"

namespace rdeepc::plant {

/// One track piece. radius = 0 means straight; positive radius turns left.
struct Segment {
  double length = 0.0;
  double radius = 0.0;

  double curvature() const { return radius == 0.0 ? 0.0 : 1.0 / radius; }
};

struct PathPose {
  double x = 0.0, y = 0.0, heading = 0.0, curvature = 0.0;
};

struct Projection {
  double s = 0.0;        // arclength of the closest centerline point
  double offset = 0.0;   // signed distance of the query point, positive left of the path
  double heading = 0.0;  // centerline heading there
  double curvature = 0.0;
};

class TrackGeometry {
 public:
  TrackGeometry() = default;

  explicit TrackGeometry(std::vector<Segment> segments, double duration_target = 0.0)
      : segments_(std::move(segments)), duration_target_(duration_target) {
    if (segments_.empty()) throw std::invalid_argument("TrackGeometry: no segments");
    PathPose pose;
    double s = 0.0;
    for (const auto& seg : segments_) {
      if (!(seg.length > 0.0) || !std::isfinite(seg.radius)) {
        throw std::invalid_argument("TrackGeometry: segment length must be positive");
      }
      starts_.push_back(pose);
      offsets_.push_back(s);
      pose = advance(pose, seg, seg.length);
      s += seg.length;
    }
    end_ = pose;
    length_ = s;
  }

  double length() const { return length_; }
  double duration_target() const { return duration_target_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Centerline pose at arclength s, extended straight past either end.
  PathPose pose_at(double s) const {
    if (s <= 0.0) return advance(starts_.front(), Segment{1.0, 0.0}, s);
    for (size_t i = 0; i < segments_.size(); ++i) {
      if (s <= offsets_[i] + segments_[i].length) {
        return advance(starts_[i], segments_[i], s - offsets_[i]);
      }
    }
    PathPose p = advance(end_, Segment{1.0, 0.0}, s - length_);
    return p;
  }

  Projection project(double x, double y) const {
    Projection best;
    double best_d = std::numeric_limits<double>::infinity();
    auto consider = [&](double s, const PathPose& p) {
      const double dx = x - p.x, dy = y - p.y;
      const double d = std::hypot(dx, dy);
      if (d < best_d) {
        best_d = d;
        best.s = s;
        best.offset = -std::sin(p.heading) * dx + std::cos(p.heading) * dy;
        best.heading = p.heading;
        best.curvature = p.curvature;
      }
    };
    for (size_t i = 0; i < segments_.size(); ++i) {
      const Segment& seg = segments_[i];
      const PathPose& a = starts_[i];
      double local;
      if (seg.radius == 0.0) {
        local = std::cos(a.heading) * (x - a.x) + std::sin(a.heading) * (y - a.y);
      } else {
        const double cx = a.x - seg.radius * std::sin(a.heading);
        const double cy = a.y + seg.radius * std::cos(a.heading);
        const double start_angle = std::atan2(a.y - cy, a.x - cx);
        double sweep = std::atan2(y - cy, x - cx) - start_angle;
        if (seg.radius < 0.0) sweep = -sweep;
        sweep = std::remainder(sweep, 2.0 * std::numbers::pi);
        local = sweep * std::abs(seg.radius);
      }
      // Extend the first and last pieces so the projection is defined off the ends.
      const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
      const double hi = i + 1 == segments_.size() ? std::numeric_limits<double>::infinity() : seg.length;
      local = std::min(std::max(local, lo), hi);
      if (seg.radius != 0.0 && (local < 0.0 || local > seg.length)) {
        local = std::min(std::max(local, 0.0), seg.length);
      }
      const double s = offsets_[i] + local;
      consider(s, pose_at(s));
    }
    return best;
  }

 private:
  static PathPose advance(const PathPose& a, const Segment& seg, double ds) {
    PathPose p;
    if (seg.radius == 0.0) {
      p.x = a.x + ds * std::cos(a.heading);
      p.y = a.y + ds * std::sin(a.heading);
      p.heading = a.heading;
      return p;
    }
    const double k = 1.0 / seg.radius;
    p.heading = a.heading + k * ds;
    p.x = a.x + (std::sin(p.heading) - std::sin(a.heading)) / k;
    p.y = a.y - (std::cos(p.heading) - std::cos(a.heading)) / k;
    p.curvature = k;
    return p;
  }

  std::vector<Segment> segments_;
  std::vector<PathPose> starts_;
  std::vector<double> offsets_;
  PathPose end_;
  double length_ = 0.0;
  double duration_target_ = 0.0;
};

/// `segments = L1:R1, L2:R2, ...` with R = 0 for straights.
inline TrackGeometry track_from(const util::Config& c) {
  std::string spec = c.get_string("segments");
  std::vector<Segment> segs;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::runtime_error("track segment '" + item + "' needs length:radius");
    segs.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return TrackGeometry(std::move(segs), c.get_double("duration", 0.0));
}

/// Curvature sign flipped: the mirror image about the start heading.
inline TrackGeometry mirrored(const TrackGeometry& t) {
  std::vector<Segment> segs = t.segments();
  for (auto& s : segs) s.radius = -s.radius;
  return TrackGeometry(std::move(segs), t.duration_target());
}

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_TRACK_HPP_
