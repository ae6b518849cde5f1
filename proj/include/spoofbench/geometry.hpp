#pragma once

// Coordinate frames, pinhole projection, frustum construction/membership,
// oriented boxes and ray primitives shared by every other component.
//
// Conventions:
//   sensor frame: x forward, y left, z up (right-handed), meters
//   camera frame: z forward, x right, y down
//   yaw: rotation about +z, wrapped to [-pi, pi)

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spoofbench {

constexpr double kPi = 3.14159265358979323846;

inline double wrap_angle(double a) {
  // wrap to [-pi, pi)
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm_bev() const { return std::hypot(x, y); }
  Vec3 normalized() const {
    const double n = norm();
    if (n <= 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return *this / n;
  }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Pixel {
  double u{0.0};
  double v{0.0};
};

// Row-major 3x3 rotation plus translation. Enough rigid-motion support for
// sensor<->camera changes of frame; no general SE(3) algebra needed here.
struct RigidTransform {
  std::array<double, 9> r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 t{};

  Vec3 apply(const Vec3& p) const {
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z + t.x,
            r[3] * p.x + r[4] * p.y + r[5] * p.z + t.y,
            r[6] * p.x + r[7] * p.y + r[8] * p.z + t.z};
  }
  Vec3 rotate(const Vec3& p) const {
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z,
            r[3] * p.x + r[4] * p.y + r[5] * p.z,
            r[6] * p.x + r[7] * p.y + r[8] * p.z};
  }
  RigidTransform inverse() const {
    RigidTransform inv;
    inv.r = {r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]};
    const Vec3 it = inv.rotate(t);
    inv.t = {-it.x, -it.y, -it.z};
    return inv;
  }
  static RigidTransform identity() { return {}; }
};

struct BBox2D {
  double u_min{0.0};
  double v_min{0.0};
  double u_max{0.0};
  double v_max{0.0};

  bool valid() const { return u_min < u_max && v_min < v_max; }
  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  Pixel center() const { return {0.5 * (u_min + u_max), 0.5 * (v_min + v_max)}; }
  bool contains(const Pixel& p) const {
    // inclusive on all edges so boundary samples count as inside
    return p.u >= u_min && p.u <= u_max && p.v >= v_min && p.v <= v_max;
  }
};

struct CameraModel {
  double fx{721.5377};
  double fy{721.5377};
  double cx{621.0};
  double cy{187.5};
  int width{1242};
  int height{375};
  RigidTransform sensor_to_camera{};  // maps sensor-frame points into camera frame

  void validate() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("camera: focal lengths must be positive");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("camera: principal point outside image");
  }

  // Camera looking along sensor +x, centered at the sensor origin.
  // cam x = -sensor y, cam y = -sensor z, cam z = sensor x.
  static CameraModel forward_facing() {
    CameraModel cam;
    cam.sensor_to_camera.r = {0, -1, 0, 0, 0, -1, 1, 0, 0};
    cam.sensor_to_camera.t = {0, 0, 0};
    return cam;
  }
};

struct Box3D {
  Vec3 center{};
  double length{0.0};  // extent along local x (yaw direction)
  double width{0.0};   // extent along local y
  double height{0.0};  // extent along z
  double yaw{0.0};     // radians about +z, in [-pi, pi)

  void validate() const {
    if (length <= 0 || width <= 0 || height <= 0)
      throw std::invalid_argument("box: non-positive extent");
  }
};

// 8 corners in sensor frame; first 4 bottom, last 4 top.
inline std::array<Vec3, 8> box_corners(const Box3D& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hl = 0.5 * b.length, hw = 0.5 * b.width, hh = 0.5 * b.height;
  std::array<Vec3, 8> out;
  int k = 0;
  for (double dz : {-hh, hh})
    for (auto [dx, dy] : {std::pair{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}})
      out[k++] = {b.center.x + c * dx - s * dy, b.center.y + s * dx + c * dy,
                  b.center.z + dz};
  return out;
}

// BEV footprint corners (counter-clockwise for yaw=0).
inline std::array<Pixel, 4> box_bev_corners(const Box3D& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hl = 0.5 * b.length, hw = 0.5 * b.width;
  std::array<Pixel, 4> out;
  int k = 0;
  for (auto [dx, dy] : {std::pair{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}})
    out[k++] = {b.center.x + c * dx - s * dy, b.center.y + s * dx + c * dy};
  return out;
}

inline bool box_contains(const Box3D& b, const Vec3& p, double dilation = 0.0) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const Vec3 d = p - b.center;
  const double lx = c * d.x + s * d.y;
  const double ly = -s * d.x + c * d.y;
  return std::abs(lx) <= 0.5 * b.length + dilation &&
         std::abs(ly) <= 0.5 * b.width + dilation &&
         std::abs(d.z) <= 0.5 * b.height + dilation;
}

struct Frustum {
  CameraModel camera;
  BBox2D bbox;
  double z_near{1.0};
  double z_far{100.0};
};

// How "range" along the frustum axis is measured. The Euclidean convention
// (distance from the sensor origin) is the default; axis_depth measures
// camera-frame z instead. The two differ by <2% inside typical frusta.
enum class RangeConvention { euclidean, axis_depth };

// Pinhole projection of a sensor-frame point. Empty when the point is at or
// behind the camera plane (z <= 0).
inline std::optional<Pixel> project_point(const CameraModel& cam, const Vec3& p_sensor) {
  const Vec3 pc = cam.sensor_to_camera.apply(p_sensor);
  if (pc.z <= 0.0) return std::nullopt;
  return Pixel{cam.fx * pc.x / pc.z + cam.cx, cam.fy * pc.y / pc.z + cam.cy};
}

// Axis-aligned 2D bounds over the projected visible corners, clipped to the
// image. Empty when every corner is behind the camera or the clipped box is
// degenerate.
inline std::optional<BBox2D> project_box3d(const CameraModel& cam, const Box3D& box) {
  double u0 = 1e300, v0 = 1e300, u1 = -1e300, v1 = -1e300;
  bool any = false;
  for (const Vec3& corner : box_corners(box)) {
    const auto px = project_point(cam, corner);
    if (!px) continue;
    any = true;
    u0 = std::min(u0, px->u);
    v0 = std::min(v0, px->v);
    u1 = std::max(u1, px->u);
    v1 = std::max(v1, px->v);
  }
  if (!any) return std::nullopt;
  BBox2D bb{std::max(u0, 0.0), std::max(v0, 0.0),
            std::min(u1, double(cam.width)), std::min(v1, double(cam.height))};
  if (!bb.valid()) return std::nullopt;
  return bb;
}

inline Frustum frustum_from_bbox(const CameraModel& cam, const BBox2D& bbox,
                                 double z_near = 1.0, double z_far = 100.0) {
  if (!bbox.valid()) throw std::invalid_argument("frustum: degenerate bbox");
  if (!(z_near > 0.0 && z_near < z_far))
    throw std::invalid_argument("frustum: need 0 < z_near < z_far");
  return Frustum{cam, bbox, z_near, z_far};
}

inline bool frustum_contains(const Frustum& f, const Vec3& p_sensor) {
  const Vec3 pc = f.camera.sensor_to_camera.apply(p_sensor);
  if (pc.z < f.z_near || pc.z > f.z_far) return false;
  const Pixel px{f.camera.fx * pc.x / pc.z + f.camera.cx,
                 f.camera.fy * pc.y / pc.z + f.camera.cy};
  return f.bbox.contains(px);
}

// Point on the ray through the bbox center pixel at the given range,
// expressed in the sensor frame. Range is Euclidean distance from the sensor
// origin by default; see RangeConvention.
inline Vec3 frustum_axis_point(const Frustum& f, double range_m,
                               RangeConvention conv = RangeConvention::euclidean) {
  const Pixel c = f.bbox.center();
  // unit ray in camera frame through the bbox center
  Vec3 dir{(c.u - f.camera.cx) / f.camera.fx, (c.v - f.camera.cy) / f.camera.fy, 1.0};
  const double n = dir.norm();
  double depth;  // camera-frame z of the result
  if (conv == RangeConvention::euclidean) {
    depth = range_m / n;
  } else {
    depth = range_m;
  }
  if (depth < f.z_near || depth > f.z_far)
    throw std::out_of_range("frustum_axis_point: range outside frustum depth bounds");
  const Vec3 p_cam = dir * depth;
  return f.camera.sensor_to_camera.inverse().apply(p_cam);
}

// Pull a point onto the closest position inside the frustum: clamp depth to
// [z_near, z_far] and the projected pixel into the bbox, then unproject at
// the clamped depth.
inline Vec3 clamp_to_frustum(const Frustum& f, const Vec3& p_sensor) {
  Vec3 pc = f.camera.sensor_to_camera.apply(p_sensor);
  const double z = std::clamp(pc.z, f.z_near, f.z_far);
  double u = f.camera.fx * pc.x / std::max(pc.z, 1e-9) + f.camera.cx;
  double v = f.camera.fy * pc.y / std::max(pc.z, 1e-9) + f.camera.cy;
  if (pc.z <= 0.0) {  // behind camera: fall back to the bbox center ray
    const Pixel c = f.bbox.center();
    u = c.u;
    v = c.v;
  }
  u = std::clamp(u, f.bbox.u_min, f.bbox.u_max);
  v = std::clamp(v, f.bbox.v_min, f.bbox.v_max);
  const Vec3 clamped{(u - f.camera.cx) / f.camera.fx * z,
                     (v - f.camera.cy) / f.camera.fy * z, z};
  return f.camera.sensor_to_camera.inverse().apply(clamped);
}

// Slab-method ray/box intersection in the box's yaw-rotated frame.
// Returns the (t_enter, t_exit) interval, or nothing when the ray misses or
// the whole interval lies behind the origin (t_exit <= 0).
inline std::optional<std::pair<double, double>> ray_box_intersect(
    const Vec3& origin, const Vec3& dir, const Box3D& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const Vec3 ro = origin - box.center;
  const double ox = c * ro.x + s * ro.y;
  const double oy = -s * ro.x + c * ro.y;
  const double oz = ro.z;
  const double dx = c * dir.x + s * dir.y;
  const double dy = -s * dir.x + c * dir.y;
  const double dz = dir.z;

  double t0 = -1e300, t1 = 1e300;
  const double half[3] = {0.5 * box.length, 0.5 * box.width, 0.5 * box.height};
  const double o[3] = {ox, oy, oz};
  const double d[3] = {dx, dy, dz};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-12) {
      if (std::abs(o[i]) > half[i]) return std::nullopt;
      continue;
    }
    double ta = (-half[i] - o[i]) / d[i];
    double tb = (half[i] - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  if (t1 <= 0.0) return std::nullopt;
  return std::make_pair(t0, t1);
}

namespace detail {

inline double polygon_area(const std::vector<Pixel>& poly) {
  double a = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Pixel& p = poly[i];
    const Pixel& q = poly[(i + 1) % n];
    a += p.u * q.v - q.u * p.v;
  }
  return 0.5 * std::abs(a);
}

// Sutherland-Hodgman clip of a convex polygon against the half-plane left of
// edge a->b (counter-clockwise subject polygon assumed).
inline std::vector<Pixel> clip_halfplane(const std::vector<Pixel>& poly,
                                         const Pixel& a, const Pixel& b) {
  std::vector<Pixel> out;
  const size_t n = poly.size();
  auto side = [&](const Pixel& p) {
    return (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
  };
  for (size_t i = 0; i < n; ++i) {
    const Pixel& cur = poly[i];
    const Pixel& nxt = poly[(i + 1) % n];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc >= 0) != (sn >= 0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur.u + t * (nxt.u - cur.u), cur.v + t * (nxt.v - cur.v)});
    }
  }
  return out;
}

}  // namespace detail

// Intersection-over-union of the yaw-rotated BEV footprints.
inline double iou_bev(const Box3D& a, const Box3D& b) {
  const auto ca = box_bev_corners(a);
  const auto cb = box_bev_corners(b);
  std::vector<Pixel> poly(ca.begin(), ca.end());
  for (int i = 0; i < 4 && !poly.empty(); ++i)
    poly = detail::clip_halfplane(poly, cb[i], cb[(i + 1) % 4]);
  double inter = poly.size() >= 3 ? detail::polygon_area(poly) : 0.0;
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace spoofbench
