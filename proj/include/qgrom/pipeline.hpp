#pragma once

#include "qgrom/lstm.hpp"
#include "qgrom/pod.hpp"
#include "qgrom/rom_gp.hpp"

// Stage glue shared by the command-line tool and the end-to-end tests.
namespace qgrom::pipeline {

/// Spacing of the training snapshots stored in the basis.
double sample_interval(const PodBasis& basis);

/// Number of states on the uniform grid t0, t0+dt, ... that do not pass t_end.
std::size_t states_in_window(double t0, double t_end, double dt);

/// Galerkin ROM started from the projection of the first training snapshot,
/// recorded at the training sample interval up to t_end.
RomTrajectory run_gp(const PodBasis& basis, const GalerkinTensors& tensors, double gp_dt,
                     double t_end);

/// LSTM rollout seeded with the first sigma training coefficients. The result
/// holds the seed states followed by the predictions and covers
/// t0, t0+dt, ... up to t_end.
RomTrajectory run_predict(const lstm::LstmModel& model, const PodBasis& basis, double t_end,
                          double dt);

}  // namespace qgrom::pipeline
