#include <sstream>

#include "doctest.h"
#include "flr/commands.hpp"
#include "flr/manifest.hpp"
#include "flr/pfm.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace flr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "flr");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// One small dataset shared by the cases below.
const fs::path& dataset() {
  static const fs::path dir = [] {
    auto d = testing::fresh_dir("cli_data");
    const auto r = run_cli({"synth", "--scene", "cornell", "--out", d.string(), "--width", "32", "--height", "32",
                        "--spp", "1,4", "--ref-spp", "32", "--ao-spp", "4", "--lowres-factor", "4"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("synth writes a manifest with noisy frames and low-res companions") {
  const auto m = read_manifest(dataset() / "manifest.json");
  CHECK_NOTHROW(m.frame("cornell_spp1"));
  CHECK_NOTHROW(m.frame("cornell_spp4"));
  CHECK(m.frame("cornell_spp1_lo4").width == 8);
  const auto images = load_frame(m, "cornell_spp1");
  for (const char* role : {"noisy_indirect", "reference_indirect", "direct", "albedo", "normal", "depth", "ao",
                           "world_pos"})
    CHECK(images.count(role) == 1);
}

TEST_CASE("denoise writes outputs, metrics and an output manifest") {
  const auto out = testing::fresh_dir("cli_denoise");
  const auto r = run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1", "--out",
                      out.string(), "--mode", "fast", "--guides", "normal,depth,ao"});
  REQUIRE(r.code == 0);
  const auto metrics = nlohmann::json::parse(testing::slurp(out / "cornell_spp1_metrics.json"));
  for (const char* k : {"psnr", "ssim", "rmse", "smape"}) CHECK(metrics.contains(k));
  const auto m = read_manifest(out / "manifest.json");
  CHECK(m.frame("cornell_spp1").metrics_file == "cornell_spp1_metrics.json");
  CHECK(read_pfm(out / "cornell_spp1_denoised.pfm").width() == 32);
  CHECK(r.err.find("solve") != std::string::npos);
}

TEST_CASE("denoise with --upsample-factor produces full resolution") {
  const auto out = testing::fresh_dir("cli_upsample");
  const auto r = run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1", "--out",
                      out.string(), "--upsample-factor", "4"});
  REQUIRE(r.code == 0);
  const auto img = read_pfm(out / "cornell_spp1_denoised.pfm");
  CHECK(img.width() == 32);
  CHECK(img.height() == 32);
  const auto bad = run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1", "--out",
                        out.string(), "--upsample-factor", "2"});
  CHECK(bad.code == cli::kDataError);  // no _lo2 companion frame
}

TEST_CASE("denoise consumes an enhanced-guides directory") {
  const auto dir = testing::fresh_dir("cli_enhanced");
  std::mt19937 rng(61);
  // Stand-in for the exported guide stacks: 4 model and 4 map channels.
  write_pfm(testing::random_image(32, 32, 3, rng), dir / "model_a.pfm");
  write_pfm(testing::random_image(32, 32, 1, rng), dir / "model_b.pfm");
  write_pfm(testing::random_image(32, 32, 3, rng), dir / "map_a.pfm");
  write_pfm(testing::random_image(32, 32, 1, rng), dir / "map_b.pfm");
  DatasetManifest m;
  m.frames.push_back(FrameEntry{"cornell_spp1", 32, 32,
                                {{"enhanced_guides_model", {"model_a.pfm", "model_b.pfm"}},
                                 {"enhanced_guides_map", {"map_a.pfm", "map_b.pfm"}}},
                                ""});
  write_manifest(m, dir / "manifest.json");
  const auto out = testing::fresh_dir("cli_enhanced_out");
  const auto r = run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1", "--out",
                      out.string(), "--enhanced-guides", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "cornell_spp1_denoised.pfm"));

  fs::remove(dir / "map_b.pfm");
  const auto missing = run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1",
                            "--out", out.string(), "--enhanced-guides", dir.string()});
  CHECK(missing.code == cli::kDataError);
  CHECK(missing.err.find("enhanced_guides_map") != std::string::npos);
}

TEST_CASE("metrics command") {
  const auto dir = testing::fresh_dir("cli_metrics");
  write_pfm(ImagePlane(4, 4, 3, 0.0f), dir / "a.pfm");
  write_pfm(ImagePlane(4, 4, 3, 0.1f), dir / "b.pfm");
  write_pfm(ImagePlane(4, 4, 1, 0.1f), dir / "c.pfm");
  const auto r = run_cli({"metrics", (dir / "a.pfm").string(), (dir / "b.pfm").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["psnr"].get<double>() == doctest::Approx(20.0));
  const auto same = nlohmann::json::parse(run_cli({"metrics", (dir / "a.pfm").string(), (dir / "a.pfm").string()}).out);
  CHECK(same["psnr"] == "inf");
  CHECK(run_cli({"metrics", (dir / "a.pfm").string(), (dir / "c.pfm").string()}).code == cli::kDataError);
  CHECK(run_cli({"metrics", (dir / "a.pfm").string(), (dir / "zz.pfm").string()}).code == cli::kDataError);
}

TEST_CASE("compare runs each config and emits a table") {
  const auto dir = testing::fresh_dir("cli_compare");
  const auto r = run_cli({"compare", (dataset() / "manifest.json").string(), "cornell_spp1",
                      "name=fast,mode=fast,guides=normal+depth+ao", "name=dense,mode=dense,sigma=4",
                      "--json", (dir / "c.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("fast") != std::string::npos);
  const auto j = nlohmann::json::parse(testing::slurp(dir / "c.json"));
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["timings_ms"].size() == 4);
  CHECK(j["rows"][1]["timings_ms"].size() == 1);
  CHECK(j.contains("input"));
  CHECK(run_cli({"compare", (dataset() / "manifest.json").string(), "cornell_spp1"}).code == cli::kUsage);
  CHECK(run_cli({"compare", (dataset() / "manifest.json").string(), "cornell_spp1", "mode=warp"}).code ==
        cli::kUsage);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"denoise", "x.json", "--frame"}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
  const auto out = testing::fresh_dir("cli_codes");
  CHECK(run_cli({"denoise", "/nonexistent/manifest.json", "--frame", "f", "--out", out.string()}).code ==
        cli::kDataError);
  CHECK(run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "cornell_spp1", "--out",
             out.string(), "--downsample", "3"})
            .code == cli::kUsage);
  CHECK(run_cli({"denoise", (dataset() / "manifest.json").string(), "--frame", "nope", "--out", out.string()})
            .code == cli::kDataError);
  CHECK(run_cli({"synth", "--scene", "nope", "--out", out.string()}).code == cli::kUsage);
}

TEST_CASE("denoise surfaces numerical failure as exit code 4") {
  const auto dir = testing::fresh_dir("cli_numerical");
  // All-zero guides with eps = 0 in the Tikhonov solve give a singular system.
  write_pfm(ImagePlane(8, 8, 3, 0.0f), dir / "zero3.pfm");
  write_pfm(ImagePlane(8, 8, 1, 0.0f), dir / "zero1.pfm");
  write_pfm(ImagePlane(8, 8, 3, 0.5f), dir / "half.pfm");
  DatasetManifest m;
  m.frames.push_back(FrameEntry{"f", 8, 8,
                                {{"noisy_indirect", {"half.pfm"}},
                                 {"albedo", {"half.pfm"}},
                                 {"normal", {"zero3.pfm"}},
                                 {"depth", {"zero1.pfm"}},
                                 {"ao", {"zero1.pfm"}}},
                                ""});
  write_manifest(m, dir / "manifest.json");
  const auto out = testing::fresh_dir("cli_numerical_out");
  const auto r = run_cli({"denoise", (dir / "manifest.json").string(), "--frame", "f", "--out", out.string(),
                      "--mode", "dense", "--solver", "tikhonov", "--eps", "1e-300", "--sigma", "1"});
  CHECK(r.code == cli::kNumericalFailure);
}
