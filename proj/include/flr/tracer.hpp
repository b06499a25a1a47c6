#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flr/image.hpp"

namespace flr {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend Vec3 operator*(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(Vec3 o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(Vec3 a) { return a * (1.0 / length(a)); }

struct Sphere {
  Vec3 center;
  double radius = 1;
};
struct Plane {
  Vec3 point;
  Vec3 normal{0, 1, 0};
};
struct AxisBox {
  Vec3 min;
  Vec3 max;
};

struct Primitive {
  std::variant<Sphere, Plane, AxisBox> shape;
  Vec3 albedo{0.75, 0.75, 0.75};
};

// One-sided rectangle emitting along normalize(cross(edge_u, edge_v)). The
// light is sampled for direct lighting only; rays do not intersect it.
struct AreaLight {
  Vec3 corner;
  Vec3 edge_u;
  Vec3 edge_v;
  Vec3 emission;

  Vec3 normal() const { return normalize(cross(edge_u, edge_v)); }
  double area() const { return length(cross(edge_u, edge_v)); }
};

struct Camera {
  Vec3 origin;
  Vec3 look_at;
  Vec3 up{0, 1, 0};
  double vfov_degrees = 40;
};

struct Scene {
  std::string name;
  std::vector<Primitive> primitives;
  AreaLight light;
  Camera camera;
  double ao_distance = 2.0;

  // Throws UsageError on an invalid definition.
  void validate() const;
  // Diameter of the bounding sphere of finite geometry, light and camera.
  double depth_scale() const;
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

struct Hit {
  double t = 0;
  Vec3 position;
  Vec3 normal;  // unit, facing the incoming ray
  Vec3 albedo;
};

// Closest hit with t in (t_min, t_max).
std::optional<Hit> intersect(const Scene& scene, const Ray& ray, double t_min = 1e-6,
                             double t_max = 1e30);
bool occluded(const Scene& scene, const Ray& ray, double t_max);

// Primary ray through the center of pixel (x, y); row 0 is the top.
Ray camera_ray(const Camera& camera, int width, int height, int x, int y);
// Ray through continuous image coordinates; pixel (x, y) spans [x, x+1).
Ray camera_ray(const Camera& camera, int width, int height, double fx, double fy);

struct RenderOutput {
  ImagePlane indirect;  // demodulated: divided by primary-hit albedo
  ImagePlane direct;    // albedo-modulated
  ImagePlane albedo;
  ImagePlane normal;
  ImagePlane depth;
  ImagePlane ao;
  ImagePlane world_pos;
  int spp = 0;
  std::uint64_t seed = 0;
};

struct RenderSettings {
  int spp = 1;
  std::uint64_t seed = 0;
  // Path vertices with light sampling; 2 = direct plus one indirect bounce.
  int max_bounces = 2;
  int ao_spp = 64;  // 0 skips AO (plane stays at 1)
  // Negative selects the scene's ao_distance.
  double ao_distance = -1;
  // n > 1 traces primary rays through the n x n sub-pixel centers: guides
  // are averaged over them and sample s uses sub-pixel s mod n^2. spp must
  // be a multiple of n^2. Used for low-resolution renders whose pixels cover
  // n x n output pixels.
  int subpixels = 1;
};

RenderOutput render(const Scene& scene, int width, int height, const RenderSettings& settings);

inline RenderOutput render(const Scene& scene, int width, int height, int spp, std::uint64_t seed,
                           int max_bounces = 2) {
  RenderSettings s;
  s.spp = spp;
  s.seed = seed;
  s.max_bounces = max_bounces;
  return render(scene, width, height, s);
}

// Unoccluded fraction of cosine-distributed rays from the primary hit within
// `distance`; stratified over the hemisphere. Misses read 1.
ImagePlane render_ao(const Scene& scene, int width, int height, int spp, double distance,
                     std::uint64_t seed, int subpixels = 1);

// Full radiance from one path-throughput estimator (no direct/indirect
// split), used to check the split renders against each other.
ImagePlane render_combined(const Scene& scene, int width, int height, int spp, std::uint64_t seed,
                           int max_bounces = 2);

// "cornell", "spheres", "corridor".
std::vector<Scene> builtin_scenes();
Scene builtin_scene(const std::string& name);

Scene scene_from_json(const std::string& json_text);
std::string scene_to_json(const Scene& scene);
Scene read_scene_file(const std::string& path);

}  // namespace flr
