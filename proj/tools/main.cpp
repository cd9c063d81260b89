#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "phasent/errors.hpp"
#include "phasent/parallel.hpp"

using namespace phasent;
using namespace phasent::cli;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDomain = 3, kIo = 4 };

std::string joined(int argc, char** argv) {
  std::ostringstream o;
  for (int k = 1; k < argc; ++k) o << (k > 1 ? " " : "") << argv[k];
  return o.str();
}

void print(const Summary& summary) {
  for (const auto& [k, v] : summary) std::cout << k << " = " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphoton state, camera and correlation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> frames;
  unsigned threads = 0;
  app.add_option("--config", config_path, "INI-style run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides run.output)");
  app.add_option("--seed", seed, "camera seed (overrides camera.seed)");
  app.add_option("--frames", frames, "frame count (overrides run.frames)");
  app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency");

  std::optional<double> zbar_mm, z_mm;
  auto add_plane = [&](CLI::App* sub) {
    auto* a = sub->add_option("--zbar", zbar_mm, "folded detection distance behind the lens [mm]");
    auto* b = sub->add_option("--z", z_mm, "free-space distance from the crystal [mm]");
    a->excludes(b);
  };

  auto* state = app.add_subcommand("state", "analytic amplitude and density at a plane");
  add_plane(state);

  auto* simulate = app.add_subcommand("simulate", "render camera frames at a plane");
  add_plane(simulate);

  std::string stack_path, profile = "propagation";
  auto* reconstruct = app.add_subcommand("reconstruct", "joint distribution from a frame stack");
  reconstruct->add_option("--stack", stack_path, "BPF1 frame stack")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--profile", profile, "cleaning profile: none, propagation, interference");
  add_plane(reconstruct);

  std::vector<double> sweep_zbars;
  std::size_t points = 30;
  std::string mode = "analytic";
  auto* sweep = app.add_subcommand("sweep", "Fedorov ratio against detection distance");
  sweep->add_option("--zbar", sweep_zbars, "comma-separated detection distances [mm]")->delimiter(',');
  sweep->add_option("--points", points, "evenly spaced points when no --zbar list is given")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
  sweep->add_option("--mode", mode, "analytic or simulate");

  std::string input_state = "position";
  auto* interfere = app.add_subcommand("interfere", "double-slit far field of a relayed state");
  interfere->add_option("--state", input_state, "position (z = 0) or phase (z = z_p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    Invocation inv{config_path.empty() ? RunConfig{} : load_config(config_path), joined(argc, argv)};
    RunConfig& c = inv.config;
    if (!out_dir.empty()) c.output = out_dir;
    if (seed) c.camera.seed = *seed;
    if (frames) c.frames = *frames;
    validate(c);
    set_worker_count(threads);

    Plane plane;
    if (zbar_mm) plane.zbar = *zbar_mm * 1e-3;
    if (z_mm) plane.z = *z_mm * 1e-3;

    Summary summary;
    if (*state) {
      summary = cmd_state(inv, plane);
    } else if (*simulate) {
      summary = cmd_simulate(inv, plane);
    } else if (*reconstruct) {
      summary = cmd_reconstruct(inv, stack_path, parse_profile(profile), plane);
    } else if (*sweep) {
      for (double& v : sweep_zbars) v *= 1e-3;
      summary = cmd_sweep(inv, sweep_zbars, points, parse_mode(mode));
    } else if (*interfere) {
      summary = cmd_interfere(inv, parse_state(input_state));
    }
    print(summary);
    std::cout << "output = " << c.output.string() << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
