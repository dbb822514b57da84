// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "catts/calibtrain.hpp"
#include "catts/error.hpp"
#include "catts/harness.hpp"
#include "catts/log.hpp"
#include "catts/noisegen.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string dataset;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string expert_backend;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--dataset", f.dataset, "Question records (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", f.out_dir, "Directory for traces and reports");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--backend", f.backend, "sim:<scenario> or http(s)://host[:port]#model");
  cmd->add_option("--expert-backend", f.expert_backend, "Expert backend; defaults to --backend");
}

catts::RunConfig resolve(const RunFlags& f) {
  catts::RunConfig c = f.config.empty() ? catts::RunConfig{} : catts::load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.backend.empty()) c.backend = f.backend;
  if (!f.expert_backend.empty()) c.expert_backend = f.expert_backend;
  catts::validate(c);
  return c;
}

std::vector<catts::QuestionRecord> records_or_throw(const std::string& path, std::size_t& skipped) {
  auto load = catts::load_dataset(path);
  for (const auto& e : load.errors) std::cerr << "skipped " << e << "\n";
  skipped = load.errors.size();
  if (load.records.empty()) throw catts::Error(catts::Errc::NoRecords, path + " holds no usable record");
  return std::move(load.records);
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

int cmd_run(const RunFlags& f) {
  const auto config = resolve(f);
  const auto summary = catts::run_dataset(f.dataset, config, catts::open_backends(config),
                                          catts::open_prompts(config), f.out_dir);
  std::printf("records %zu  skipped %zu  failed %zu  accuracy %.4f\n", summary.records, summary.skipped,
              summary.failed, summary.accuracy);
  if (summary.calibration) {
    std::printf("ece %.4f  auroc %s\n", summary.calibration->ece, opt(summary.calibration->auroc).c_str());
  }
  std::printf("traces: %s/traces.jsonl\n", f.out_dir.c_str());
  return summary.exit_code();
}

int cmd_scale(const RunFlags& f, const std::vector<std::size_t>& sizes) {
  const auto config = resolve(f);
  std::size_t skipped = 0;
  const auto records = records_or_throw(f.dataset, skipped);
  const auto result =
      catts::run_scaling(records, config, catts::open_backends(config), catts::open_prompts(config), sizes);
  catts::write_text(std::filesystem::path(f.out_dir) / "scaling.csv", catts::scaling_csv(result));
  catts::write_text(std::filesystem::path(f.out_dir) / "scaling.json", catts::to_json(result).dump(2) + "\n");
  std::cout << catts::scaling_csv(result);
  for (const auto& [method, fit] : result.fits) {
    std::printf("slope %-20s %s\n", method.c_str(), fit ? opt(fit->slope).c_str() : "n/a");
  }
  return skipped > 0 ? 1 : 0;
}

int cmd_calibrate(const RunFlags& f) {
  const auto config = resolve(f);
  std::size_t skipped = 0;
  const auto records = records_or_throw(f.dataset, skipped);
  const auto traces =
      catts::run_records(records, config, catts::open_backends(config), catts::open_prompts(config));
  const auto rows = catts::calibration_table(traces, config.ece_bins);
  catts::write_text(std::filesystem::path(f.out_dir) / "traces.jsonl", catts::traces_jsonl(traces));
  catts::write_text(std::filesystem::path(f.out_dir) / "calibration.csv", catts::calibration_csv(rows));
  std::cout << catts::calibration_csv(rows);
  std::size_t failed = 0;
  for (const auto& t : traces) failed += t.error ? 1 : 0;
  return skipped + failed > 0 ? 1 : 0;
}

int cmd_reward_demo(std::uint64_t seed, std::size_t steps, const std::string& mode, const std::string& out_dir) {
  catts::calib::DemoConfig config;
  config.steps = steps;
  if (mode == "output") config.mode = catts::calib::RewardMode::OutputOnly;
  const auto result = catts::calib::run_demo(config, seed);
  std::string csv = "step,mean_reward,ece,cd,accuracy\n";
  for (const auto& p : result.curve) {
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f\n", p.step, p.mean_reward, p.ece, p.cd, p.accuracy);
    csv += line;
  }
  catts::write_text(std::filesystem::path(out_dir) / "curve.csv", csv);
  auto show = [](const char* name, const catts::CalibrationReport& r) {
    std::printf("%-7s ece %.4f  cd %s  auroc %s  accuracy %.4f\n", name, r.ece, opt(r.confidence_drop).c_str(),
                opt(r.auroc).c_str(), r.accuracy);
  };
  show("before", result.before);
  show("after", result.after);
  std::printf("curve: %s/curve.csv\n", out_dir.c_str());
  return 0;
}

int cmd_noise(const std::string& image_path, const std::string& saliency_path, double sigma, std::uint64_t seed,
              const std::string& mode, const std::string& out) {
  const auto image = catts::read_pnm_file(image_path);
  const auto saliency = saliency_path.empty() ? catts::uniform_saliency(image.width, image.height)
                                              : catts::saliency_from_image(catts::read_pnm_file(saliency_path));
  catts::RasterImage result;
  switch (catts::parse_perturbation(mode)) {
    case catts::Perturbation::Noise: result = catts::apply_noise(image, saliency, sigma, seed); break;
    case catts::Perturbation::Occlusion: result = catts::occlude(image, saliency); break;
    case catts::Perturbation::Mosaic: result = catts::mosaic(image, saliency); break;
  }
  catts::write_pnm_file(result, out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-aware test-time scaling"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "off, error, warn, info or debug");

  RunFlags run_flags, scale_flags, calib_flags;
  auto* run = app.add_subcommand("run", "Run the pipeline over a dataset");
  add_run_flags(run, run_flags);

  auto* scale = app.add_subcommand("scale", "Accuracy against sample count for CA-TTS and baselines");
  add_run_flags(scale, scale_flags);
  std::vector<std::size_t> sizes = catts::kScalingSizes;
  scale->add_option("--sizes", sizes, "Sample counts")->delimiter(',');

  auto* calibrate = app.add_subcommand("calibrate", "ECE, AUROC and confidence drop per condition");
  add_run_flags(calibrate, calib_flags);

  auto* demo = app.add_subcommand("reward-demo", "Train the toy policy with the calibration reward");
  std::uint64_t demo_seed = 17;
  std::size_t demo_steps = catts::calib::DemoConfig{}.steps;
  std::string demo_mode = "full";
  std::string demo_out = "out";
  demo->add_option("--seed", demo_seed, "Seed");
  demo->add_option("--steps", demo_steps, "Training steps");
  demo->add_option("--reward", demo_mode, "full or output")->check(CLI::IsMember({"full", "output"}));
  demo->add_option("--out-dir", demo_out, "Directory for curve.csv");

  auto* noise = app.add_subcommand("noise", "Perturb a PNM image");
  std::string image, saliency, out_image, noise_mode = "noise";
  double sigma = 64.0;
  std::uint64_t noise_seed = 0;
  noise->add_option("--image", image, "Input P5/P6 image")->required()->check(CLI::ExistingFile);
  noise->add_option("--saliency", saliency, "Grayscale saliency map")->check(CLI::ExistingFile);
  noise->add_option("--sigma", sigma, "Noise scale in 8-bit units");
  noise->add_option("--seed", noise_seed, "Seed");
  noise->add_option("--mode", noise_mode, "noise, occlusion or mosaic");
  noise->add_option("--out", out_image, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    catts::set_log_level(log_level);
    if (*run) return cmd_run(run_flags);
    if (*scale) return cmd_scale(scale_flags, sizes);
    if (*calibrate) return cmd_calibrate(calib_flags);
    if (*demo) return cmd_reward_demo(demo_seed, demo_steps, demo_mode, demo_out);
    if (*noise) return cmd_noise(image, saliency, sigma, noise_seed, noise_mode, out_image);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
