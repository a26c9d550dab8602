#pragma once

// Command-line front end.
//
//   layout   --image <png|pgm|ppm> --out <json> [--config <file>] [--overlay <png>] [--page N]
//   run      --layout <json>... --trace <jsonl> --policy halfway|tempo
//            --device mock|serial:PATH --log <jsonl> [--config <file>] [--realtime]
//   simulate --layout <json>... --spp <sec> --noise <px> --outliers <p> --seed <n>
//            --out <jsonl> [--rate-hz <hz>] [--oracle-out <json>] [--config <file>]
//   evaluate --log <jsonl> --oracle <json>
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 device.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pageflip/config.hpp"
#include "pageflip/device.hpp"
#include "pageflip/error.hpp"
#include "pageflip/evaluate.hpp"
#include "pageflip/image_io.hpp"
#include "pageflip/layout.hpp"
#include "pageflip/layout_io.hpp"
#include "pageflip/session.hpp"
#include "pageflip/simulate.hpp"
#include "pageflip/trace.hpp"

namespace pageflip {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitDevice = 3 };

namespace cli_detail {

struct LayoutArgs {
  std::string image;
  std::string out;
  std::string config;
  std::string overlay;
  int page = 0;
};

struct RunArgs {
  std::vector<std::string> layouts;
  std::string trace;
  std::optional<std::string> policy;  // overrides the config file
  std::string device = "mock";
  std::string log;
  std::string config;
  double mock_latency_ms = 20.0;
  bool realtime = false;
};

struct SimulateArgs {
  std::vector<std::string> layouts;
  std::optional<double> spp;
  std::optional<double> noise;
  std::optional<double> outliers;
  std::optional<std::uint64_t> seed;
  std::optional<double> rate_hz;
  std::string out;
  std::string oracle_out;
  std::string config;
};

struct EvaluateArgs {
  std::string log;
  std::string oracle;
};

inline nlohmann::json config_or_empty(const std::string& path) {
  return path.empty() ? nlohmann::json::object() : load_config(path);
}

inline std::vector<PageLayout> read_layouts(const std::vector<std::string>& paths) {
  std::vector<PageLayout> out;
  for (const std::string& p : paths) out.push_back(read_layout(p));
  return out;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

inline int do_layout(const LayoutArgs& a, std::ostream& out) {
  LayoutConfig cfg;
  PolicyConfig policy;
  const nlohmann::json j = config_or_empty(a.config);
  apply_config(j, cfg);
  apply_config(j, policy);

  const GrayImage gray = as_gray(read_image(a.image));
  const PageLayout layout = analyze_page(gray, a.page, cfg);
  write_layout(a.out, layout);
  if (!a.overlay.empty()) write_png(a.overlay, render_overlay(gray, layout, policy.turn_fraction));
  out << a.out << ": " << layout.systems.size() << " systems\n";
  return kExitOk;
}

inline int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  SessionConfig cfg;
  apply_config(config_or_empty(a.config), cfg);
  if (a.policy) cfg.policy.kind = parse_policy_kind(*a.policy);
  cfg.device_timeout_ms = device_timeout_from_env(cfg.device_timeout_ms);
  cfg.realtime = a.realtime;
  cfg.validate();

  const std::vector<PageLayout> layouts = read_layouts(a.layouts);
  VectorSource source(load_trace(a.trace));

  std::unique_ptr<TurnDevice> device;
  if (a.device == "mock") {
    device = std::make_unique<MockDevice>(a.mock_latency_ms, a.realtime);
  } else if (a.device.rfind("serial:", 0) == 0 && a.device.size() > 7) {
    try {
      device = std::make_unique<SerialDevice>(a.device.substr(7), cfg.device_timeout_ms);
    } catch (const DeviceIo& e) {
      err << "error: " << e.what() << '\n';
      return kExitDevice;
    }
  } else {
    err << "error: --device must be 'mock' or 'serial:PATH', got '" << a.device << "'\n";
    return kExitUsage;
  }

  const SessionLog log = run_session(layouts, source, cfg, *device);
  std::ofstream f = open_out(a.log);
  write_log(f, log);
  out << a.log << ": " << log.events.size() << " events, " << log.turns().size() << " turns\n";
  return kExitOk;
}

inline int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const nlohmann::json j = config_or_empty(a.config);
  SyntheticConfig cfg;
  PolicyConfig policy;
  apply_config(j, cfg);
  apply_config(j, policy);
  if (a.spp) cfg.seconds_per_page = *a.spp;
  if (a.noise) cfg.noise_px = *a.noise;
  if (a.outliers) cfg.outlier_prob = *a.outliers;
  if (a.seed) cfg.seed = *a.seed;
  if (a.rate_hz) cfg.rate_hz = *a.rate_hz;
  cfg.validate();

  const std::vector<PageLayout> layouts = read_layouts(a.layouts);
  const std::vector<PagedPrediction> traj = synth_trajectory(layouts, cfg);
  std::ofstream f = open_out(a.out);
  write_trace(f, predictions_only(traj));
  if (!a.oracle_out.empty()) {
    std::ofstream o = open_out(a.oracle_out);
    o << oracle_to_json(oracle_schedule(layouts, cfg, policy)).dump(2) << '\n';
  }
  out << a.out << ": " << traj.size() << " predictions\n";
  return kExitOk;
}

inline int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const SessionLog log = read_log(a.log);
  const std::vector<double> oracle = read_oracle(a.oracle);
  out << metrics_to_json(evaluate_turns(log, oracle)).dump(2) << '\n';
  return kExitOk;
}

}  // namespace cli_detail

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"pageflip: automatic page turning from sheet-image score following"};
  app.require_subcommand(1);

  LayoutArgs la;
  auto* layout = app.add_subcommand("layout", "detect systems on a page image");
  layout->add_option("--image", la.image, "page image (PNG, PGM or PPM)")->required();
  layout->add_option("--out", la.out, "layout JSON output")->required();
  layout->add_option("--config", la.config, "JSON config file");
  layout->add_option("--overlay", la.overlay, "overlay PNG output");
  layout->add_option("--page", la.page, "page index recorded in the layout");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "replay a tracker trace through filter, policy and device");
  run->add_option("--layout", ra.layouts, "page layouts in page order")->required();
  run->add_option("--trace", ra.trace, "tracker trace JSONL")->required();
  run->add_option("--policy", ra.policy, "turn policy")->check(CLI::IsMember({"halfway", "tempo"}));
  run->add_option("--device", ra.device, "mock or serial:PATH");
  run->add_option("--log", ra.log, "session log JSONL output")->required();
  run->add_option("--config", ra.config, "JSON config file");
  run->add_option("--mock-latency-ms", ra.mock_latency_ms, "latency reported by the mock device");
  run->add_flag("--realtime", ra.realtime, "pace predictions to the wall clock");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic tracker trace");
  sim->add_option("--layout", sa.layouts, "page layouts in page order")->required();
  sim->add_option("--spp", sa.spp, "seconds per page");
  sim->add_option("--noise", sa.noise, "position noise sigma in px");
  sim->add_option("--outliers", sa.outliers, "outlier probability");
  sim->add_option("--seed", sa.seed, "random seed");
  sim->add_option("--rate-hz", sa.rate_hz, "predictions per second");
  sim->add_option("--out", sa.out, "trace JSONL output")->required();
  sim->add_option("--oracle-out", sa.oracle_out, "oracle turn times JSON output");
  sim->add_option("--config", sa.config, "JSON config file");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "score session turns against oracle times");
  eval->add_option("--log", ea.log, "session log JSONL")->required();
  eval->add_option("--oracle", ea.oracle, "oracle JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (layout->parsed()) return do_layout(la, out);
    if (run->parsed()) return do_run(ra, out, err);
    if (sim->parsed()) return do_simulate(sa, out);
    return do_evaluate(ea, out);
  } catch (const DeviceTimeout& e) {
    err << "error: " << e.what() << '\n';
    return kExitDevice;
  } catch (const DeviceIo& e) {
    err << "error: " << e.what() << '\n';
    return kExitDevice;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace pageflip
