#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"
#include "phasent/correlation.hpp"

namespace phasent::cli {

/// Observation plane: a folded detection distance zbar behind the lens, or
/// a free-space distance z from the crystal. At most one is set.
struct Plane {
  std::optional<double> zbar;
  std::optional<double> z;
};

/// Everything a command needs besides its own options. Outputs land in
/// config.output, which is created if missing.
struct Invocation {
  RunConfig config;
  std::string command_line;
};

/// Analytic amplitude and density at a plane (default z = 0).
Summary cmd_state(const Invocation& inv, const Plane& plane);

/// Camera frames of the pair distribution at a plane (default: imaging plane).
Summary cmd_simulate(const Invocation& inv, const Plane& plane);

enum class Profile { none, propagation, interference };
Profile parse_profile(const std::string& name);

/// Gamma, x-reduction, cleaning and DG fit of a stored frame stack. With a
/// zbar, widths are also reported in the object plane.
Summary cmd_reconstruct(const Invocation& inv, const std::filesystem::path& stack, Profile profile,
                        const Plane& plane);

SweepMode parse_mode(const std::string& name);

/// Fedorov ratio over zbar values (metres). Empty list: `count` points on
/// (f, imaging distance] with the phase plane snapped in.
Summary cmd_sweep(const Invocation& inv, std::vector<double> zbars, std::size_t count, SweepMode mode);

enum class InputState { position, phase };
InputState parse_state(const std::string& name);

/// Double-slit far field for the state at z = 0 (position) or z = z_p (phase),
/// relayed onto the slits.
Summary cmd_interfere(const Invocation& inv, InputState state);

}  // namespace phasent::cli
