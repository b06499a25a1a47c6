#include "flr/tracer.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "flr/errors.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

constexpr double kRayOffset = 1e-4;
constexpr double kInvPi = 1.0 / std::numbers::pi;

bool in_unit_range(Vec3 v) {
  return v.x >= 0 && v.x <= 1 && v.y >= 0 && v.y <= 1 && v.z >= 0 && v.z <= 1;
}

std::optional<double> hit_sphere(const Sphere& s, const Ray& ray, double t_min, double t_max) {
  const Vec3 oc = ray.origin - s.center;
  const double b = dot(oc, ray.dir);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t <= t_min) t = -b + root;
  if (t <= t_min || t >= t_max) return std::nullopt;
  return t;
}

std::optional<double> hit_plane(const Plane& p, const Ray& ray, double t_min, double t_max) {
  const double denom = dot(ray.dir, p.normal);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = dot(p.point - ray.origin, p.normal) / denom;
  if (t <= t_min || t >= t_max) return std::nullopt;
  return t;
}

struct BoxHit {
  double t;
  int axis;
};

std::optional<BoxHit> hit_box(const AxisBox& b, const Ray& ray, double t_min, double t_max) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis_near = 0;
  int axis_far = 0;
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.dir[a];
    const double lo = b.min[a];
    const double hi = b.max[a];
    if (std::abs(d) < 1e-15) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o) / d;
    double t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      axis_near = a;
    }
    if (t1 < t_far) {
      t_far = t1;
      axis_far = a;
    }
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near > t_min && t_near < t_max) return BoxHit{t_near, axis_near};
  if (t_far > t_min && t_far < t_max) return BoxHit{t_far, axis_far};
  return std::nullopt;
}

Vec3 axis_vector(int axis) {
  if (axis == 0) return {1, 0, 0};
  if (axis == 1) return {0, 1, 0};
  return {0, 0, 1};
}

// Orthonormal basis around a unit normal (Duff et al. 2017).
void basis(Vec3 n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n.z);
  const double a = -1.0 / (sign + n.z);
  const double bb = n.x * n.y * a;
  t = {1.0 + sign * n.x * n.x * a, sign * bb, -sign * n.x};
  b = {bb, sign + n.y * n.y * a, -n.y};
}

Vec3 cosine_direction(Vec3 n, double u1, double u2) {
  const double phi = 2.0 * std::numbers::pi * u1;
  const double r = std::sqrt(u2);
  Vec3 t, b;
  basis(n, t, b);
  const double z = std::sqrt(std::max(0.0, 1.0 - u2));
  return normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z);
}

Vec3 offset_origin(const Hit& hit) { return hit.position + hit.normal * kRayOffset; }

// One-sample estimate of irradiance from the area light at a surface point.
Vec3 light_irradiance(const Scene& scene, const Hit& hit, double u1, double u2) {
  const AreaLight& light = scene.light;
  const Vec3 p = light.corner + light.edge_u * u1 + light.edge_v * u2;
  const Vec3 origin = offset_origin(hit);
  const Vec3 to_light = p - origin;
  const double dist2 = dot(to_light, to_light);
  const double dist = std::sqrt(dist2);
  const Vec3 wi = to_light * (1.0 / dist);
  const double cos_surface = dot(hit.normal, wi);
  const double cos_light = -dot(light.normal(), wi);
  if (cos_surface <= 0 || cos_light <= 0) return {};
  if (occluded(scene, Ray{origin, wi}, dist - kRayOffset)) return {};
  return light.emission * (cos_surface * cos_light * light.area() / dist2);
}

Vec3 reflected_direct(const Scene& scene, const Hit& hit, Pcg32& rng) {
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  return hit.albedo * light_irradiance(scene, hit, u1, u2) * kInvPi;
}

ImagePlane vec_plane(int w, int h) { return ImagePlane(w, h, 3); }

void store(ImagePlane& img, int x, int y, Vec3 v) {
  img.set(x, y, 0, static_cast<float>(v.x));
  img.set(x, y, 1, static_cast<float>(v.y));
  img.set(x, y, 2, static_cast<float>(v.z));
}

void check_render_args(const Scene& scene, int width, int height, int spp) {
  scene.validate();
  if (width < 1 || height < 1) throw UsageError("render: image size must be positive");
  if (spp < 1) throw UsageError("render: spp must be >= 1");
}

}  // namespace

void Scene::validate() const {
  if (primitives.empty()) throw UsageError("scene '" + name + "' has no primitives");
  for (const auto& p : primitives) {
    if (!in_unit_range(p.albedo)) throw UsageError("scene '" + name + "': albedo outside [0,1]");
    if (const auto* s = std::get_if<Sphere>(&p.shape); s && !(s->radius > 0))
      throw UsageError("scene '" + name + "': sphere radius must be positive");
    if (const auto* pl = std::get_if<Plane>(&p.shape); pl && !(length(pl->normal) > 0))
      throw UsageError("scene '" + name + "': plane normal is zero");
    if (const auto* b = std::get_if<AxisBox>(&p.shape);
        b && !(b->min.x <= b->max.x && b->min.y <= b->max.y && b->min.z <= b->max.z))
      throw UsageError("scene '" + name + "': box min exceeds max");
  }
  if (!(light.area() > 0)) throw UsageError("scene '" + name + "': light has zero area");
  if (light.emission.x < 0 || light.emission.y < 0 || light.emission.z < 0)
    throw UsageError("scene '" + name + "': negative emission");
  if (!(camera.vfov_degrees > 0 && camera.vfov_degrees < 180))
    throw UsageError("scene '" + name + "': fov must lie in (0, 180)");
  if (length(camera.look_at - camera.origin) == 0) throw UsageError("scene '" + name + "': degenerate camera");
  if (!(ao_distance > 0)) throw UsageError("scene '" + name + "': ao_distance must be positive");
}

double Scene::depth_scale() const {
  Vec3 lo = camera.origin;
  Vec3 hi = camera.origin;
  auto grow = [&](Vec3 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  };
  for (const auto& p : primitives) {
    if (const auto* s = std::get_if<Sphere>(&p.shape)) {
      grow(s->center - Vec3{s->radius, s->radius, s->radius});
      grow(s->center + Vec3{s->radius, s->radius, s->radius});
    } else if (const auto* b = std::get_if<AxisBox>(&p.shape)) {
      grow(b->min);
      grow(b->max);
    }
  }
  grow(light.corner);
  grow(light.corner + light.edge_u + light.edge_v);
  return length(hi - lo);
}

std::optional<Hit> intersect(const Scene& scene, const Ray& ray, double t_min, double t_max) {
  std::optional<Hit> best;
  double closest = t_max;
  for (const auto& prim : scene.primitives) {
    Vec3 normal;
    std::optional<double> t;
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      t = hit_sphere(*s, ray, t_min, closest);
      if (t) normal = (ray.origin + ray.dir * *t - s->center) * (1.0 / s->radius);
    } else if (const auto* p = std::get_if<Plane>(&prim.shape)) {
      t = hit_plane(*p, ray, t_min, closest);
      if (t) normal = normalize(p->normal);
    } else if (const auto* b = std::get_if<AxisBox>(&prim.shape)) {
      const auto bh = hit_box(*b, ray, t_min, closest);
      if (bh) {
        t = bh->t;
        normal = axis_vector(bh->axis);
      }
    }
    if (!t) continue;
    closest = *t;
    if (dot(normal, ray.dir) > 0) normal = -normal;
    best = Hit{*t, ray.origin + ray.dir * *t, normal, prim.albedo};
  }
  return best;
}

bool occluded(const Scene& scene, const Ray& ray, double t_max) {
  for (const auto& prim : scene.primitives) {
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      if (hit_sphere(*s, ray, 1e-6, t_max)) return true;
    } else if (const auto* p = std::get_if<Plane>(&prim.shape)) {
      if (hit_plane(*p, ray, 1e-6, t_max)) return true;
    } else if (const auto* b = std::get_if<AxisBox>(&prim.shape)) {
      if (hit_box(*b, ray, 1e-6, t_max)) return true;
    }
  }
  return false;
}

Ray camera_ray(const Camera& camera, int width, int height, double fx, double fy) {
  const Vec3 forward = normalize(camera.look_at - camera.origin);
  const Vec3 right = normalize(cross(forward, camera.up));
  const Vec3 up = cross(right, forward);
  const double half = std::tan(camera.vfov_degrees * std::numbers::pi / 360.0);
  const double aspect = static_cast<double>(width) / height;
  const double u = (fx / width * 2.0 - 1.0) * half * aspect;
  const double v = (1.0 - fy / height * 2.0) * half;
  return Ray{camera.origin, normalize(forward + right * u + up * v)};
}

Ray camera_ray(const Camera& camera, int width, int height, int x, int y) {
  return camera_ray(camera, width, height, x + 0.5, y + 0.5);
}

namespace {

// Primary hits through the n x n sub-pixel centers of pixel (px, py).
std::vector<std::optional<Hit>> subpixel_hits(const Scene& scene, int width, int height, int px, int py,
                                              int n) {
  std::vector<std::optional<Hit>> hits;
  hits.reserve(static_cast<std::size_t>(n * n));
  for (int sy = 0; sy < n; ++sy)
    for (int sx = 0; sx < n; ++sx)
      hits.push_back(intersect(scene, camera_ray(scene.camera, width, height, px + (sx + 0.5) / n,
                                                   py + (sy + 0.5) / n)));
  return hits;
}

void check_subpixels(int subpixels, int spp) {
  if (subpixels < 1) throw UsageError("render: subpixels must be >= 1");
  if (spp % (subpixels * subpixels) != 0)
    throw UsageError("render: spp must be a multiple of subpixels^2");
}

}  // namespace

RenderOutput render(const Scene& scene, int width, int height, const RenderSettings& settings) {
  check_render_args(scene, width, height, settings.spp);
  if (settings.max_bounces < 1) throw UsageError("render: max_bounces must be >= 1");
  const int n = settings.subpixels;
  check_subpixels(n, settings.spp);
  const int subs = n * n;

  RenderOutput out{vec_plane(width, height),
                   vec_plane(width, height),
                   vec_plane(width, height),
                   vec_plane(width, height),
                   ImagePlane(width, height, 1, 1.0f),
                   ImagePlane(width, height, 1, 1.0f),
                   vec_plane(width, height),
                   settings.spp,
                   settings.seed};
  const double depth_scale = scene.depth_scale();
  const double inv_spp = 1.0 / settings.spp;

#pragma omp parallel for schedule(dynamic, 1)
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      const auto hits = n == 1 ? std::vector<std::optional<Hit>>{intersect(
                                     scene, camera_ray(scene.camera, width, height, px, py))}
                               : subpixel_hits(scene, width, height, px, py, n);
      int hit_count = 0;
      Vec3 albedo, normal, position;
      double depth = 0;
      for (const auto& h : hits) {
        if (!h) {
          depth += 1.0;
          continue;
        }
        ++hit_count;
        albedo += h->albedo;
        normal += h->normal;
        position += h->position;
        depth += std::min(1.0, h->t / depth_scale);
      }
      if (hit_count == 0) continue;
      const double inv_subs = 1.0 / subs;
      store(out.albedo, px, py, albedo * inv_subs);
      store(out.normal, px, py, normal * inv_subs);
      store(out.world_pos, px, py, position * inv_subs);
      out.depth.set(px, py, 0, static_cast<float>(depth * inv_subs));

      const auto pixel = static_cast<std::uint64_t>(py) * static_cast<std::uint64_t>(width) +
                         static_cast<std::uint64_t>(px);
      Vec3 direct_sum;
      Vec3 indirect_sum;   // demodulated
      Vec3 modulated_sum;  // times the albedo of the sample's own primary hit
      for (int s = 0; s < settings.spp; ++s) {
        const auto& primary = hits[static_cast<std::size_t>(s % subs)];
        if (!primary) continue;
        Pcg32 rng = sample_rng(settings.seed, pixel, static_cast<std::uint64_t>(s));
        direct_sum += reflected_direct(scene, *primary, rng);

        // Indirect contribution, already divided by the primary albedo: the
        // cosine-weighted bounce cancels f_s cos / pdf down to the albedo.
        Hit vertex = *primary;
        Vec3 throughput{1, 1, 1};
        Vec3 sample;
        for (int bounce = 1; bounce < settings.max_bounces; ++bounce) {
          const double u1 = rng.next_double();
          const double u2 = rng.next_double();
          const Ray next{offset_origin(vertex), cosine_direction(vertex.normal, u1, u2)};
          const auto hit = intersect(scene, next);
          if (!hit) break;
          sample += throughput * reflected_direct(scene, *hit, rng);
          throughput = throughput * hit->albedo;
          vertex = *hit;
        }
        indirect_sum += sample;
        modulated_sum += sample * primary->albedo;
      }
      store(out.direct, px, py, direct_sum * inv_spp);
      if (n == 1) {
        store(out.indirect, px, py, indirect_sum * inv_spp);
      } else {
        // Pixel-averaged modulated lighting over the pixel-averaged albedo.
        const Vec3 a = albedo * inv_subs;
        const Vec3 m = modulated_sum * inv_spp;
        store(out.indirect, px, py,
              Vec3{a.x > 0 ? m.x / a.x : 0, a.y > 0 ? m.y / a.y : 0, a.z > 0 ? m.z / a.z : 0});
      }
    }
  }

  const double ao_distance = settings.ao_distance > 0 ? settings.ao_distance : scene.ao_distance;
  if (settings.ao_spp > 0)
    out.ao = render_ao(scene, width, height, settings.ao_spp, ao_distance, settings.seed, n);
  return out;
}

ImagePlane render_ao(const Scene& scene, int width, int height, int spp, double distance,
                     std::uint64_t seed, int subpixels) {
  check_render_args(scene, width, height, spp);
  if (!(distance > 0)) throw UsageError("render_ao: distance must be positive");
  const int n = subpixels;
  check_subpixels(n, spp);
  const int subs = n * n;
  const int per_sub = spp / subs;
  ImagePlane ao(width, height, 1, 1.0f);
  int strata = static_cast<int>(std::sqrt(static_cast<double>(per_sub)));
  if (strata * strata != per_sub) strata = 0;

#pragma omp parallel for schedule(dynamic, 1)
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      const auto hits = n == 1 ? std::vector<std::optional<Hit>>{intersect(
                                     scene, camera_ray(scene.camera, width, height, px, py))}
                               : subpixel_hits(scene, width, height, px, py, n);
      if (std::none_of(hits.begin(), hits.end(), [](const auto& h) { return h.has_value(); })) continue;
      const auto pixel = static_cast<std::uint64_t>(py) * static_cast<std::uint64_t>(width) +
                         static_cast<std::uint64_t>(px);
      int open = 0;
      for (int s = 0; s < spp; ++s) {
        const auto& primary = hits[static_cast<std::size_t>(s % subs)];
        // Misses read as unoccluded.
        if (!primary) {
          ++open;
          continue;
        }
        const int k = s / subs;
        Pcg32 rng = sample_rng(seed, pixel, static_cast<std::uint64_t>(s), 1);
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        if (strata > 0) {
          u1 = ((k % strata) + u1) / strata;
          u2 = ((k / strata) + u2) / strata;
        }
        const Ray ray{offset_origin(*primary), cosine_direction(primary->normal, u1, u2)};
        if (!occluded(scene, ray, distance)) ++open;
      }
      ao.set(px, py, 0, static_cast<float>(static_cast<double>(open) / spp));
    }
  }
  return ao;
}

ImagePlane render_combined(const Scene& scene, int width, int height, int spp, std::uint64_t seed,
                           int max_bounces) {
  check_render_args(scene, width, height, spp);
  ImagePlane out = vec_plane(width, height);

#pragma omp parallel for schedule(dynamic, 1)
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      const Ray primary_ray = camera_ray(scene.camera, width, height, px, py);
      const auto pixel = static_cast<std::uint64_t>(py) * static_cast<std::uint64_t>(width) +
                         static_cast<std::uint64_t>(px);
      Vec3 sum;
      for (int s = 0; s < spp; ++s) {
        Pcg32 rng = sample_rng(seed, pixel, static_cast<std::uint64_t>(s), 2);
        Ray ray = primary_ray;
        Vec3 throughput{1, 1, 1};
        for (int vertex = 0; vertex < max_bounces; ++vertex) {
          const auto hit = intersect(scene, ray);
          if (!hit) break;
          const double l1 = rng.next_double();
          const double l2 = rng.next_double();
          sum += throughput * hit->albedo * light_irradiance(scene, *hit, l1, l2) * kInvPi;
          throughput = throughput * hit->albedo;
          const double u1 = rng.next_double();
          const double u2 = rng.next_double();
          ray = Ray{offset_origin(*hit), cosine_direction(hit->normal, u1, u2)};
        }
      }
      store(out, px, py, sum * (1.0 / spp));
    }
  }
  return out;
}

}  // namespace flr
