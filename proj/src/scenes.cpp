#include <fstream>
#include <iterator>

#include "flr/errors.hpp"
#include "flr/tracer.hpp"
#include "json.hpp"

namespace flr {

namespace {

Primitive box(Vec3 lo, Vec3 hi, Vec3 albedo) { return {AxisBox{lo, hi}, albedo}; }
Primitive sphere(Vec3 c, double r, Vec3 albedo) { return {Sphere{c, r}, albedo}; }
Primitive plane(Vec3 p, Vec3 n, Vec3 albedo) { return {Plane{p, n}, albedo}; }

constexpr Vec3 kWhite{0.75, 0.75, 0.75};

// Scene definitions are versioned by name; change them only with a new name.
Scene cornell() {
  Scene s;
  s.name = "cornell";
  s.primitives = {
      box({-5.5, -0.5, -5.5}, {5.5, 0.0, 5.5}, kWhite),            // floor
      box({-5.5, 10.0, -5.5}, {5.5, 10.5, 5.5}, kWhite),           // ceiling
      box({-5.5, -0.5, -5.5}, {5.5, 10.5, -5.0}, kWhite),          // back
      box({-5.5, -0.5, -5.5}, {-5.0, 10.5, 5.5}, {0.75, 0.15, 0.12}),
      box({5.0, -0.5, -5.5}, {5.5, 10.5, 5.5}, {0.15, 0.6, 0.15}),
      box({-3.2, 0.0, -3.0}, {-0.8, 6.0, -0.6}, kWhite),           // tall blocker
      box({0.6, 0.0, -0.5}, {3.2, 3.0, 2.1}, kWhite),              // short blocker
  };
  s.light = {{-1.5, 9.95, -1.5}, {3, 0, 0}, {0, 0, 3}, {18, 16, 13}};
  s.camera = {{0, 5, 19.5}, {0, 5, 0}, {0, 1, 0}, 36};
  s.ao_distance = 2.0;
  return s;
}

Scene spheres() {
  Scene s;
  s.name = "spheres";
  s.primitives = {
      plane({0, 0, 0}, {0, 1, 0}, {0.7, 0.7, 0.7}),
      plane({0, 0, -6}, {0, 0, 1}, {0.6, 0.65, 0.75}),
      sphere({-2.5, 1.2, -1.0}, 1.2, {0.8, 0.3, 0.2}),
      sphere({0.6, 1.6, -2.5}, 1.6, {0.3, 0.7, 0.35}),
      sphere({2.8, 0.9, 0.8}, 0.9, {0.85, 0.85, 0.85}),
  };
  s.light = {{-1.0, 7.0, -1.0}, {4, 0, 0}, {0, 0, 3}, {2.2, 2.1, 2.0}};
  s.camera = {{0, 4, 11}, {0, 1, -1}, {0, 1, 0}, 45};
  s.ao_distance = 2.0;
  return s;
}

Scene corridor() {
  Scene s;
  s.name = "corridor";
  const Vec3 wall{0.7, 0.65, 0.55};
  s.primitives = {
      box({-2.0, -0.3, -40.0}, {2.0, 0.0, 4.0}, {0.6, 0.6, 0.6}),
      box({-2.0, 4.0, -40.0}, {2.0, 4.3, 4.0}, kWhite),
      box({-2.3, -0.3, -40.0}, {-2.0, 4.3, 4.0}, wall),
      box({2.0, -0.3, -40.0}, {2.3, 4.3, 4.0}, wall),
      box({-2.3, -0.3, -40.3}, {2.3, 4.3, -40.0}, {0.5, 0.55, 0.7}),
      box({-2.0, 0.0, -10.0}, {-1.2, 4.0, -9.2}, kWhite),
      box({1.2, 0.0, -20.0}, {2.0, 4.0, -19.2}, kWhite),
  };
  s.light = {{-1.0, 3.95, -16.0}, {2, 0, 0}, {0, 0, 4}, {14, 14, 13}};
  s.camera = {{0, 2, 3}, {0, 1.8, -20}, {0, 1, 0}, 60};
  s.ao_distance = 2.0;
  return s;
}

using nlohmann::json;

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("scene: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::vector<Scene> builtin_scenes() { return {cornell(), spheres(), corridor()}; }

Scene builtin_scene(const std::string& name) {
  for (auto& s : builtin_scenes())
    if (s.name == name) return s;
  throw UsageError("unknown scene '" + name + "'");
}

Scene scene_from_json(const std::string& json_text) {
  Scene s;
  try {
    const json doc = json::parse(json_text);
    s.name = doc.value("name", std::string("custom"));
    for (const auto& jp : doc.at("primitives")) {
      const std::string type = jp.at("type").get<std::string>();
      const Vec3 albedo = jp.contains("albedo") ? json_vec(jp.at("albedo")) : kWhite;
      if (type == "sphere") s.primitives.push_back(sphere(json_vec(jp.at("center")), jp.at("radius").get<double>(), albedo));
      else if (type == "plane") s.primitives.push_back(plane(json_vec(jp.at("point")), json_vec(jp.at("normal")), albedo));
      else if (type == "box") s.primitives.push_back(box(json_vec(jp.at("min")), json_vec(jp.at("max")), albedo));
      else throw FormatError("scene: unknown primitive type '" + type + "'");
    }
    const json& jl = doc.at("light");
    s.light = {json_vec(jl.at("corner")), json_vec(jl.at("edge_u")), json_vec(jl.at("edge_v")),
               json_vec(jl.at("emission"))};
    const json& jc = doc.at("camera");
    s.camera = {json_vec(jc.at("origin")), json_vec(jc.at("look_at")),
                jc.contains("up") ? json_vec(jc.at("up")) : Vec3{0, 1, 0}, jc.at("vfov").get<double>()};
    s.ao_distance = doc.value("ao_distance", 2.0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scene_to_json(const Scene& scene) {
  json doc;
  doc["name"] = scene.name;
  doc["primitives"] = json::array();
  for (const auto& p : scene.primitives) {
    json jp;
    if (const auto* sp = std::get_if<Sphere>(&p.shape)) {
      jp["type"] = "sphere";
      jp["center"] = vec_json(sp->center);
      jp["radius"] = sp->radius;
    } else if (const auto* pl = std::get_if<Plane>(&p.shape)) {
      jp["type"] = "plane";
      jp["point"] = vec_json(pl->point);
      jp["normal"] = vec_json(pl->normal);
    } else if (const auto* b = std::get_if<AxisBox>(&p.shape)) {
      jp["type"] = "box";
      jp["min"] = vec_json(b->min);
      jp["max"] = vec_json(b->max);
    }
    jp["albedo"] = vec_json(p.albedo);
    doc["primitives"].push_back(jp);
  }
  doc["light"] = {{"corner", vec_json(scene.light.corner)},
                  {"edge_u", vec_json(scene.light.edge_u)},
                  {"edge_v", vec_json(scene.light.edge_v)},
                  {"emission", vec_json(scene.light.emission)}};
  doc["camera"] = {{"origin", vec_json(scene.camera.origin)},
                   {"look_at", vec_json(scene.camera.look_at)},
                   {"up", vec_json(scene.camera.up)},
                   {"vfov", scene.camera.vfov_degrees}};
  doc["ao_distance"] = scene.ao_distance;
  return doc.dump(2) + "\n";
}

Scene read_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("scene", path);
  return scene_from_json(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

}  // namespace flr
