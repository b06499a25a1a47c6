#include "flr/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "flr/errors.hpp"
#include "flr/parallel.hpp"
#include "flr/pfm.hpp"
#include "flr/pipeline.hpp"
#include "flr/rng.hpp"
#include "flr/tracer.hpp"
#include "json.hpp"

namespace flr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json metrics_json(const MetricReport& m) {
  json j;
  if (std::isinf(m.psnr)) j["psnr"] = "inf";
  else j["psnr"] = m.psnr;
  j["ssim"] = m.ssim;
  j["rmse"] = m.rmse;
  j["smape"] = m.smape;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string fmt(double v, int precision = 4) {
  if (std::isinf(v)) return "inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string scene = "cornell";
  std::string scene_file;
  std::string out;
  int width = 128;
  int height = 128;
  std::string spp = "1";
  std::uint64_t seed = 1;
  int ref_spp = 1024;
  int ao_spp = 64;
  double ao_distance = -1;
  int max_bounces = 2;
  int lowres = 0;
};

std::vector<int> parse_spp_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text, ',')) {
    try {
      const int v = std::stoi(item);
      if (v < 1) throw UsageError("spp values must be >= 1");
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError("bad spp value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty spp list");
  return out;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& log) {
  const Scene scene = a.scene_file.empty() ? builtin_scene(a.scene) : read_scene_file(a.scene_file);
  const std::vector<int> spp_list = parse_spp_list(a.spp);
  if (a.width < 1 || a.height < 1) throw UsageError("width and height must be positive");
  if (a.lowres == 1 || a.lowres < 0) throw UsageError("--lowres-factor must be 0 (off) or >= 2");
  if (a.lowres > 1 && (a.width % a.lowres != 0 || a.height % a.lowres != 0))
    throw UsageError("image size is not divisible by --lowres-factor");

  const fs::path dir(a.out);
  fs::create_directories(dir);
  DatasetManifest manifest;
  const std::string prefix = scene.name;

  auto save = [&](const ImagePlane& img, const std::string& file) {
    write_pfm(img, dir / file);
    return file;
  };

  auto render_set = [&](int w, int h, const std::string& tag, int ref_spp,
                        std::uint64_t seed_salt, int subpixels) -> std::map<std::string, std::vector<std::string>> {
    const int subs = subpixels * subpixels;
    RenderSettings ref;
    ref.spp = (ref_spp + subs - 1) / subs * subs;
    ref.seed = splitmix64(a.seed ^ seed_salt) + 1;
    ref.max_bounces = a.max_bounces;
    // Keeps the AO sample count per covered output pixel.
    ref.ao_spp = a.ao_spp * subs;
    ref.ao_distance = a.ao_distance;
    ref.subpixels = subpixels;
    log << "synth: " << prefix << tag << " reference " << w << "x" << h << " @ " << ref.spp << " spp\n";
    const RenderOutput r = render(scene, w, h, ref);
    std::map<std::string, std::vector<std::string>> roles;
    const std::string base = prefix + tag + "_";
    roles["albedo"] = {save(r.albedo, base + "albedo.pfm")};
    roles["normal"] = {save(r.normal, base + "normal.pfm")};
    roles["depth"] = {save(r.depth, base + "depth.pfm")};
    roles["ao"] = {save(r.ao, base + "ao.pfm")};
    roles["world_pos"] = {save(r.world_pos, base + "world_pos.pfm")};
    roles["direct"] = {save(r.direct, base + "direct.pfm")};
    roles["reference_indirect"] = {save(remodulate_albedo(r.indirect, r.albedo), base + "reference_indirect.pfm")};
    return roles;
  };

  auto noisy = [&](int w, int h, const std::string& tag, int spp, std::uint64_t seed, int subpixels) {
    RenderSettings s;
    s.spp = spp;
    s.seed = seed;
    s.max_bounces = a.max_bounces;
    s.ao_spp = 0;
    s.subpixels = subpixels;
    log << "synth: " << prefix << tag << " noisy " << w << "x" << h << " @ " << spp << " spp\n";
    const RenderOutput r = render(scene, w, h, s);
    return save(remodulate_albedo(r.indirect, r.albedo),
                prefix + tag + "_noisy_indirect_spp" + std::to_string(spp) + ".pfm");
  };

  const auto shared = render_set(a.width, a.height, "", a.ref_spp, 0x5eedULL, 1);
  for (int spp : spp_list) {
    FrameEntry f;
    f.name = prefix + "_spp" + std::to_string(spp);
    f.width = a.width;
    f.height = a.height;
    f.channel_files = shared;
    f.channel_files["noisy_indirect"] = {noisy(a.width, a.height, "", spp, a.seed, 1)};
    manifest.frames.push_back(std::move(f));
  }

  if (a.lowres > 1) {
    const int w = a.width / a.lowres;
    const int h = a.height / a.lowres;
    const std::string tag = "_lo" + std::to_string(a.lowres);
    // Each low-res pixel traces the centers of the output pixels it covers.
    auto lo = render_set(w, h, tag, a.ref_spp, 0x10ULL, a.lowres);
    for (int spp : spp_list) {
      // Same ray budget as the full-resolution frame.
      const int lo_spp = spp * a.lowres * a.lowres;
      FrameEntry f;
      f.name = prefix + "_spp" + std::to_string(spp) + tag;
      f.width = w;
      f.height = h;
      f.channel_files = lo;
      f.channel_files["noisy_indirect"] = {noisy(w, h, tag, lo_spp, splitmix64(a.seed) ^ 0x10ULL, a.lowres)};
      manifest.frames.push_back(std::move(f));
    }
  }

  write_manifest(manifest, dir / "manifest.json");
  out << (dir / "manifest.json").string() << "\n";
  return kOk;
}

// -------------------------------------------------------------- denoise

struct RegressionArgs {
  std::string mode = "fast";
  std::string guides = "normal,depth,ao";
  float sigma = 10.0f;
  double eps = kDefaultEpsAdd;
  double eps_mul = kDefaultEpsMul;
  int downsample = 8;
  int kernel_radius = 0;
  std::string weighting = "gaussian";
  std::string solver = "normalized";
  int upsample = 1;
};

DenoiseOptions to_options(const RegressionArgs& a) {
  DenoiseOptions o;
  if (a.mode == "fast") o.config.mode = SolveMode::fast;
  else if (a.mode == "dense") o.config.mode = SolveMode::dense;
  else throw UsageError("unknown mode '" + a.mode + "'");
  if (a.weighting == "gaussian") o.config.weighting = Weighting::gaussian;
  else if (a.weighting == "box") o.config.weighting = Weighting::box;
  else throw UsageError("unknown weighting '" + a.weighting + "'");
  if (a.solver == "normalized") o.dense_solver = Solver::normalized;
  else if (a.solver == "tikhonov") o.dense_solver = Solver::tikhonov;
  else throw UsageError("unknown solver '" + a.solver + "'");
  if (a.solver == "tikhonov" && a.mode == "fast") throw UsageError("the fast mode always uses the normalized solver");
  o.guides = split_list(a.guides, ',');
  o.config.sigma = a.sigma;
  o.config.eps_add = a.eps;
  o.config.eps_mul = a.eps_mul;
  o.config.downsample = a.downsample;
  o.config.kernel_radius = a.kernel_radius;
  o.upsample = a.upsample;
  o.config.validate();
  return o;
}

void add_regression_flags(CLI::App* cmd, RegressionArgs& a) {
  cmd->add_option("--mode", a.mode, "dense | fast")->check(CLI::IsMember({"dense", "fast"}));
  cmd->add_option("--guides", a.guides, "comma-separated guide names");
  cmd->add_option("--sigma", a.sigma, "window standard deviation in pixels");
  cmd->add_option("--eps", a.eps, "additive regularizer");
  cmd->add_option("--eps-mul", a.eps_mul, "multiplicative regularizer");
  cmd->add_option("--downsample", a.downsample, "block size D");
  cmd->add_option("--kernel-radius", a.kernel_radius, "window radius (pixels dense, blocks fast); 0 = default");
  cmd->add_option("--weighting", a.weighting, "gaussian | box");
  cmd->add_option("--solver", a.solver, "dense solver: normalized | tikhonov");
  cmd->add_option("--upsample-factor", a.upsample, "fit at 1/U resolution, apply at full resolution");
}

struct DenoiseArgs {
  std::string manifest;
  std::string frame;
  std::string out;
  std::string enhanced;
  RegressionArgs reg;
};

struct LoadedFrame {
  FrameImages frame;
  std::optional<FrameImages> low;
  std::optional<EnhancedGuides> enhanced;
  int width = 0;
  int height = 0;
};

LoadedFrame load_inputs(const std::string& manifest_path, const std::string& frame_name, int upsample,
                        const std::string& enhanced_dir) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  LoadedFrame lf;
  lf.frame = load_frame(manifest, frame_name);
  lf.width = manifest.frame(frame_name).width;
  lf.height = manifest.frame(frame_name).height;
  if (upsample > 1) lf.low = load_frame(manifest, frame_name + "_lo" + std::to_string(upsample));
  if (!enhanced_dir.empty()) lf.enhanced = load_enhanced_guides(enhanced_dir, frame_name);
  return lf;
}

DenoiseInputs inputs_of(const LoadedFrame& lf) {
  DenoiseInputs in;
  in.frame = &lf.frame;
  in.low_res = lf.low ? &*lf.low : nullptr;
  in.enhanced = lf.enhanced ? &*lf.enhanced : nullptr;
  return in;
}

int cmd_denoise(const DenoiseArgs& a, std::ostream& out, std::ostream& log) {
  const DenoiseOptions options = to_options(a.reg);
  const LoadedFrame lf = load_inputs(a.manifest, a.frame, options.upsample, a.enhanced);
  const DenoiseResult result = denoise_frame(inputs_of(lf), options);
  for (const auto& t : result.timings) log << "denoise: " << t.stage << " " << fmt(t.milliseconds, 3) << " ms\n";

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.json";
  DatasetManifest manifest = fs::exists(manifest_path) ? read_manifest(manifest_path) : DatasetManifest{};

  FrameEntry entry;
  entry.name = a.frame;
  entry.width = result.output.width();
  entry.height = result.output.height();
  entry.channel_files["denoised"] = {a.frame + "_denoised.pfm"};
  entry.channel_files["denoised_indirect"] = {a.frame + "_denoised_indirect.pfm"};
  write_pfm(result.output, dir / (a.frame + "_denoised.pfm"));
  write_pfm(result.indirect, dir / (a.frame + "_denoised_indirect.pfm"));
  if (result.metrics) {
    entry.metrics_file = a.frame + "_metrics.json";
    write_text(dir / entry.metrics_file, metrics_json(*result.metrics).dump(2) + "\n");
    if (result.input_metrics) log << "denoise: input psnr " << fmt(result.input_metrics->psnr) << " dB\n";
    log << "denoise: output psnr " << fmt(result.metrics->psnr) << " dB\n";
    out << metrics_json(*result.metrics).dump() << "\n";
  }
  if (FrameEntry* existing = manifest.find(a.frame)) *existing = entry;
  else manifest.frames.push_back(entry);
  write_manifest(manifest, manifest_path);
  return kOk;
}

// -------------------------------------------------------------- metrics

int cmd_metrics(const std::string& a_path, const std::string& b_path, double peak, std::ostream& out) {
  const ImagePlane a = read_pfm(a_path);
  const ImagePlane b = read_pfm(b_path);
  if (!a.same_shape(b)) throw DimensionMismatch("metrics: image shapes differ");
  MetricReport m = compute_metrics(a, b);
  m.psnr = psnr(a, b, peak);
  out << metrics_json(m).dump() << "\n";
  return kOk;
}

// -------------------------------------------------------------- compare

struct CompareArgs {
  std::string manifest;
  std::string frame;
  std::vector<std::string> configs;
  std::string json_out;
};

struct NamedConfig {
  std::string name;
  RegressionArgs args;
  json description;
};

NamedConfig parse_config(const std::string& text) {
  NamedConfig c;
  c.name = text;
  for (const auto& kv : split_list(text, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("config entry '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    try {
      if (key == "name") c.name = value;
      else if (key == "mode") c.args.mode = value;
      else if (key == "guides") {
        auto names = split_list(value, '+');
        std::string joined;
        for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
        c.args.guides = joined;
      } else if (key == "sigma") c.args.sigma = std::stof(value);
      else if (key == "eps") c.args.eps = std::stod(value);
      else if (key == "eps-mul") c.args.eps_mul = std::stod(value);
      else if (key == "downsample") c.args.downsample = std::stoi(value);
      else if (key == "kernel-radius") c.args.kernel_radius = std::stoi(value);
      else if (key == "weighting") c.args.weighting = value;
      else if (key == "solver") c.args.solver = value;
      else if (key == "upsample-factor") c.args.upsample = std::stoi(value);
      else throw UsageError("unknown config key '" + key + "'");
    } catch (const std::logic_error&) {
      throw UsageError("bad value for config key '" + key + "'");
    }
    c.description[key] = value;
  }
  return c;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& log) {
  if (a.configs.empty()) throw UsageError("compare needs at least one config");
  std::vector<NamedConfig> configs;
  for (const auto& text : a.configs) configs.push_back(parse_config(text));

  const DatasetManifest manifest = read_manifest(a.manifest);
  const FrameImages frame = load_frame(manifest, a.frame);
  std::map<int, FrameImages> low_frames;

  json doc;
  doc["frame"] = a.frame;
  doc["rows"] = json::array();
  std::ostringstream table;
  table << std::left << std::setw(28) << "config" << std::setw(7) << "mode" << std::right << std::setw(10)
        << "psnr" << std::setw(9) << "ssim" << std::setw(11) << "rmse" << std::setw(9) << "smape"
        << std::setw(12) << "time_ms" << "\n";

  for (const auto& c : configs) {
    const DenoiseOptions options = to_options(c.args);
    DenoiseInputs in;
    in.frame = &frame;
    if (options.upsample > 1) {
      auto it = low_frames.find(options.upsample);
      if (it == low_frames.end())
        it = low_frames.emplace(options.upsample, load_frame(manifest, a.frame + "_lo" + std::to_string(options.upsample))).first;
      in.low_res = &it->second;
    }
    log << "compare: running " << c.name << "\n";
    const DenoiseResult r = denoise_frame(in, options);
    if (!r.metrics) throw DataError("compare: frame has no reference_indirect");
    if (r.input_metrics && !doc.contains("input")) doc["input"] = metrics_json(*r.input_metrics);

    json row;
    row["name"] = c.name;
    row["config"] = c.description.is_null() ? json::object() : c.description;
    row["metrics"] = metrics_json(*r.metrics);
    row["timings_ms"] = json::array();
    double total = 0;
    for (const auto& t : r.timings) {
      row["timings_ms"].push_back({{"stage", t.stage}, {"ms", t.milliseconds}});
      total += t.milliseconds;
    }
    row["total_ms"] = total;
    doc["rows"].push_back(row);

    table << std::left << std::setw(28) << c.name.substr(0, 27) << std::setw(7) << c.args.mode << std::right
          << std::setw(10) << fmt(r.metrics->psnr, 3) << std::setw(9) << fmt(r.metrics->ssim) << std::setw(11)
          << fmt(r.metrics->rmse, 6) << std::setw(9) << fmt(r.metrics->smape) << std::setw(12) << fmt(total, 2)
          << "\n";
  }

  if (doc.contains("input")) {
    const json& in = doc["input"];
    table << std::left << std::setw(28) << "(noisy input)" << std::setw(7) << "-" << std::right << std::setw(10)
          << (in["psnr"].is_string() ? std::string("inf") : fmt(in["psnr"].get<double>(), 3)) << std::setw(9)
          << fmt(in["ssim"].get<double>()) << std::setw(11) << fmt(in["rmse"].get<double>(), 6) << std::setw(9)
          << fmt(in["smape"].get<double>()) << "\n";
  }
  out << table.str();
  if (!a.json_out.empty()) write_text(a.json_out, doc.dump(2) + "\n");
  else out << doc.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fast local regression denoiser for path-traced indirect lighting"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (falls back to FLR_THREADS)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "render a synthetic dataset (manifest + PFM set)");
  synth_cmd->add_option("--scene", synth.scene, "builtin scene: cornell | spheres | corridor");
  synth_cmd->add_option("--scene-file", synth.scene_file, "JSON scene definition");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--width", synth.width);
  synth_cmd->add_option("--height", synth.height);
  synth_cmd->add_option("--spp", synth.spp, "comma-separated sample counts for noisy frames");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--ref-spp", synth.ref_spp, "samples per pixel of the reference render");
  synth_cmd->add_option("--ao-spp", synth.ao_spp);
  synth_cmd->add_option("--ao-distance", synth.ao_distance, "defaults to the scene's value");
  synth_cmd->add_option("--max-bounces", synth.max_bounces);
  synth_cmd->add_option("--lowres-factor", synth.lowres, "also render <frame>_lo<U> companions at 1/U resolution");
  synth_cmd->add_option("--threads", threads);

  DenoiseArgs denoise;
  auto* denoise_cmd = app.add_subcommand("denoise", "denoise one manifest frame");
  denoise_cmd->add_option("manifest", denoise.manifest, "dataset manifest.json")->required();
  denoise_cmd->add_option("--frame", denoise.frame)->required();
  denoise_cmd->add_option("--out", denoise.out, "output directory")->required();
  denoise_cmd->add_option("--enhanced-guides", denoise.enhanced, "directory with enhanced guide manifest");
  add_regression_flags(denoise_cmd, denoise.reg);
  denoise_cmd->add_option("--threads", threads);

  std::string metrics_a, metrics_b;
  double peak = 1.0;
  auto* metrics_cmd = app.add_subcommand("metrics", "compare two PFM images");
  metrics_cmd->add_option("image", metrics_a)->required();
  metrics_cmd->add_option("reference", metrics_b)->required();
  metrics_cmd->add_option("--peak", peak, "PSNR peak value");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "run several denoiser configs on one frame");
  compare_cmd->add_option("manifest", compare.manifest)->required();
  compare_cmd->add_option("frame", compare.frame)->required();
  compare_cmd->add_option("configs", compare.configs, "key=value,... (guides joined with '+')");
  compare_cmd->add_option("--json", compare.json_out, "write the JSON table here instead of stdout");
  compare_cmd->add_option("--threads", threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  set_thread_count(resolve_thread_count(threads));
  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, out, err);
    if (denoise_cmd->parsed()) return cmd_denoise(denoise, out, err);
    if (metrics_cmd->parsed()) return cmd_metrics(metrics_a, metrics_b, peak, out);
    if (compare_cmd->parsed()) return cmd_compare(compare, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace flr::cli
