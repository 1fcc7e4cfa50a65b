#ifndef CAPSIM_FLOW_HPP
#define CAPSIM_FLOW_HPP

#include <functional>
#include <span>

#include "capsim/velocity.hpp"

namespace capsim {

enum class Scheme { RK4, RK2 };

struct FlowConfig {
  double dt{2e-3};
  double t_end{40.0};
  Scheme scheme{Scheme::RK4};
  int renorm_every{16};
  double theta_min{0.05};
  double theta_max{kPi - 0.05};
  int stride{250};        // steps between output frames
  int threads{0};         // 0 = hardware concurrency
  double h_max{5e-3};     // refinement threshold on geodesic segment length
  double h_min{6.25e-4};  // reporting floor only; nodes are never removed
  std::size_t node_cap{200000};
  bool refine_frames{true};

  void validate() const;
};

// Material point advected with the flow; points that coincide with an
// interface node at start are linked to it and share its trajectory.
struct TrackedPoint {
  std::uint64_t id{};
  SphPoint p{kPi / 2, 0.0};
  SphPoint p0{kPi / 2, 0.0};
};

struct FrameInfo {
  int frame{};
  long step{};
  double t{};
  const CapState& state;
  std::span<const TrackedPoint> tracked;
  int nodes_inserted{};  // refinement insertions since the previous frame
};

using FrameCallback = std::function<void(const FrameInfo&)>;

// Time derivative of the (co-latitude, lifted longitude) coordinates of a
// single material point: (u_theta, u_phi / sin theta).  BandExit outside the
// configured band.  Builds a fresh evaluator; meant for tests and one-off use.
std::pair<double, double> rhs(const CapState& state, const SphPoint& p, const FlowConfig& cfg);

// One explicit Runge-Kutta step of the coupled system (interface nodes and
// tracked points advance together; substage velocities use substage geometry).
void step(CapState& state, std::vector<TrackedPoint>& points, const FlowConfig& cfg);

// Full integration with per-frame refinement, unit-norm reprojection every
// renorm_every steps, and an output callback per frame (including frame 0 and
// the final time).  Throws BandExit / ResolutionExhausted with the simulation
// time in the message; frames emitted so far remain with the caller.
void run_flow(CapState& state, std::vector<TrackedPoint>& points, const FlowConfig& cfg,
              const FrameCallback& on_frame);

}  // namespace capsim

#endif
