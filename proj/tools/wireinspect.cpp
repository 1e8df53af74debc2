#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "wireinspect/error.hpp"
#include "wireinspect/png_io.hpp"
#include "wireinspect/profile.hpp"
#include "wireinspect/profile_io.hpp"
#include "wireinspect/service.hpp"
#include "wireinspect/synth.hpp"

namespace fs = std::filesystem;
using namespace wireinspect;

namespace {

enum Exit { kPass = 0, kFail = 1, kUnclear = 2, kUsage = 3, kIo = 4 };

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::SpecInvalid:
    case ErrorCode::IndexOutOfRange:
      return kUsage;
    default:
      return kIo;
  }
}

std::vector<fs::path> pngs_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_train(const std::vector<std::string>& sample_dirs, const std::string& views_path,
              const std::string& out_path, const std::string& profile_id) {
  const auto cfg = load_views_config(views_path);
  if (sample_dirs.size() != cfg.views.size()) {
    std::cerr << "error: " << cfg.views.size() << " views configured but " << sample_dirs.size()
              << " --samples directories given\n";
    return kUsage;
  }
  std::vector<std::vector<fs::path>> files;
  for (const auto& d : sample_dirs) files.push_back(pngs_in(d));
  for (std::size_t v = 1; v < files.size(); ++v) {
    bool same = files[v].size() == files[0].size();
    for (std::size_t s = 0; same && s < files[v].size(); ++s) {
      same = files[v][s].filename() == files[0][s].filename();
    }
    if (!same) {
      std::cerr << "error: sample directories must hold the same file names\n";
      return kUsage;
    }
  }

  TrainOptions opts;
  opts.profile_id = profile_id;
  std::vector<std::vector<RgbImage>> samples(cfg.views.size());
  for (std::size_t s = 0; s < files[0].size(); ++s) {
    opts.sample_sources.push_back(files[0][s].filename().string());
    for (std::size_t v = 0; v < cfg.views.size(); ++v) {
      const auto& view = cfg.views[v];
      auto frame = read_png(files[v][s]);
      if (roi_within(view.roi, frame.width(), frame.height())) {
        const auto seg = segment_wires(crop_roi(frame, view.roi), view.bg_range, view.scan,
                                       view.expected_wires, view.gradient);
        std::cout << files[v][s].filename().string() << " [" << view.view_id
                  << "]: " << to_string(seg.path) << ", " << seg.boxes.size() << " wires"
                  << (seg.detail.empty() ? "" : " (" + seg.detail + ")") << "\n";
      }
      samples[v].push_back(std::move(frame));
    }
  }

  const auto profile = train(cfg.harness_type, cfg.views, samples, opts);
  save_profile(profile, out_path);
  std::cout << "profile " << profile.profile_id << " (" << profile.harness_type << ", "
            << profile.sample_count << " samples) written to " << out_path << "\n";
  return kPass;
}

void print_table(const InspectionResult& r) {
  for (const auto& v : r.views) {
    std::cout << "view " << v.view_id << ": segmentation " << to_string(v.segmentation);
    if (!v.segmentation_detail.empty()) std::cout << " (" << v.segmentation_detail << ")";
    std::cout << "\n";
    if (!v.wires.empty()) std::printf("  %-5s %-12s %12s %10s  %s\n", "wire", "x", "mse_rgb", "mse_hsv", "verdict");
    for (const auto& w : v.wires) {
      const std::string span = std::to_string(w.box.x_left) + ".." + std::to_string(w.box.x_right);
      std::printf("  %-5d %-12s %12.2f %10.5f  %s\n", w.box.index, span.c_str(), w.score.mse_rgb,
                  w.score.mse_hsv, std::string(to_string(w.verdict)).c_str());
    }
    if (v.orientation) {
      std::cout << "  orientation: " << to_string(v.orientation->verdict) << " (score "
                << v.orientation->score << ")"
                << (v.orientation->detail.empty() ? "" : " " + v.orientation->detail) << "\n";
    }
  }
  std::cout << "overall: " << to_string(r.overall) << "\n" << r.message << "\n";
}

int cmd_inspect(const std::string& profile_path, const std::vector<std::string>& frame_paths,
                const std::string& report_path, bool as_json) {
  const auto profile = load_profile(profile_path);
  if (frame_paths.size() != profile.views.size()) {
    std::cerr << "error: profile has " << profile.views.size() << " views but "
              << frame_paths.size() << " frames were given\n";
    return kUsage;
  }
  std::vector<RgbImage> frames;
  for (const auto& p : frame_paths) frames.push_back(read_png(p));
  const auto result = inspect(frames, profile);
  const auto doc = to_json(result);
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    print_table(result);
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!(out << doc.dump(2) << "\n")) throw Error(ErrorCode::Io, "cannot write " + report_path);
  }
  switch (result.overall) {
    case Verdict::Pass: return kPass;
    case Verdict::Fail: return kFail;
    case Verdict::Unclear: return kUnclear;
  }
  return kUnclear;
}

int cmd_gen(const std::string& spec_path, const std::string& defect, int count,
            std::uint64_t seed, const std::string& out_dir) {
  nlohmann::json j;
  {
    std::ifstream in(spec_path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + spec_path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::SpecInvalid, spec_path + ": " + e.what());
    }
  }
  const auto base = synth::spec_from_json(j);
  const auto variant = synth::parse_variant(defect);
  const auto applied = synth::apply_variant(base, variant);
  applied.validate();
  const auto expected = synth::expected_verdict(base, variant);

  fs::create_directories(out_dir);
  std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
  manifest << "file,seed,defect,expected\n";
  for (int i = 0; i < count; ++i) {
    auto spec = applied;
    spec.seed = seed + static_cast<std::uint64_t>(i);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", i);
    write_png(synth::generate(spec).frame, fs::path(out_dir) / name);
    manifest << name << "," << spec.seed << "," << synth::to_string(variant) << "," << expected << "\n";
  }
  if (!manifest.flush()) throw Error(ErrorCode::Io, "cannot write manifest in " + out_dir);
  std::cout << "wrote " << count << " frames to " << out_dir << "\n";
  return kPass;
}

int cmd_serve(const std::string& host, int port, const std::string& profiles_dir,
              const std::string& token_file, const std::string& sessions_db) {
  // Block termination signals before any thread starts so only the waiter
  // below receives them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  service::InspectionService svc(
      {profiles_dir, sessions_db, service::read_token_file(token_file)});
  const int bound = svc.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return kIo;
  }
  std::cout << "listening on " << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    svc.stop();
  });
  svc.listen();
  // listen() can also return on its own; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "stopped" << std::endl;
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wire harness colour-sequence inspection"};
  app.require_subcommand(1);

  std::vector<std::string> sample_dirs;
  std::string views_path, out_path, profile_id;
  auto* train_cmd = app.add_subcommand("train", "Train a profile from reference frames");
  train_cmd->add_option("--samples", sample_dirs, "One directory of PNG frames per view")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--views", views_path, "Views config (JSON)")->required();
  train_cmd->add_option("--out", out_path, "Profile file to write")->required();
  train_cmd->add_option("--profile-id", profile_id, "Profile id (default: random)");

  std::string profile_path, report_path;
  std::vector<std::string> frame_paths;
  bool as_json = false;
  auto* inspect_cmd = app.add_subcommand("inspect", "Inspect frames against a profile");
  inspect_cmd->add_option("--profile", profile_path, "Profile file")->required();
  inspect_cmd->add_option("--frames", frame_paths, "One PNG per view, in view order")->required();
  inspect_cmd->add_option("--report", report_path, "Also write the JSON result here");
  inspect_cmd->add_flag("--json", as_json, "Print the JSON result instead of a table");

  std::string spec_path, defect = "none", gen_out;
  int count = 1;
  std::uint64_t seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic harness frames");
  gen_cmd->add_option("--spec", spec_path, "Harness spec (JSON)")->required();
  gen_cmd->add_option("--defect", defect,
                      "none | swap:i,j | reverse_connector | shift_wire:i[,j] | drop_wire:i | blur[:r]");
  gen_cmd->add_option("--count", count, "Number of frames")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed, "Seed of the first frame; frame i uses seed + i");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  std::string host = "127.0.0.1", profiles_dir, token_file, sessions_db;
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the inspection service");
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--profiles-dir", profiles_dir, "Profile directory")->required();
  serve_cmd->add_option("--auth-token-file", token_file, "File holding the bearer token")->required();
  serve_cmd->add_option("--sessions-db", sessions_db, "Session storage directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(sample_dirs, views_path, out_path, profile_id);
    if (*inspect_cmd) return cmd_inspect(profile_path, frame_paths, report_path, as_json);
    if (*gen_cmd) return cmd_gen(spec_path, defect, count, seed, gen_out);
    if (*serve_cmd) return cmd_serve(host, port, profiles_dir, token_file, sessions_db);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
