#pragma once

#include <cstddef>
#include <vector>

#include "ntklab/linalg.hpp"
#include "ntklab/ntk.hpp"

namespace ntklab::dynamics {

/// Per-eigencomponent exponential decay fit of the projected training error.
struct DecayReport {
  std::vector<double> eigenvalues;
  std::vector<double> fitted_rates; // positive = decay; valid where included
  std::vector<double> r_squared;    // valid where included
  std::vector<bool> included;
  std::size_t horizon = 0; // time samples available to the fit
  double eta = 0.0;
};

/// Kernel prediction of the training outputs at time t with the kernel
/// frozen: y + exp(-eta*K*t) (o0 - y). With o0 = 0 this is the classic
/// (I - exp(-eta*K*t)) y form.
std::vector<double> predict_training_error(const linalg::SymMatrix& k,
                                           const std::vector<double>& y,
                                           const std::vector<double>& o0, double eta,
                                           double t);

/// Q^T (outputs - y) in the kernel eigenbasis.
std::vector<double> eigenbasis_projection(const linalg::SymMatrix& k,
                                          const std::vector<double>& outputs,
                                          const std::vector<double>& y);

/// Same projection against a precomputed decomposition (the eigenbasis must
/// stay frozen across a trajectory).
std::vector<double> eigenbasis_projection(const linalg::EigenDecomp& eig,
                                          const std::vector<double>& outputs,
                                          const std::vector<double>& y);

inline constexpr double kProjectionInitialThreshold = 1e-8;
inline constexpr double kProjectionTruncation = 1e-10;

/// Least-squares slope of log|projection| versus t per component.
/// projections[s] is the component vector at times[s]. Components whose
/// initial magnitude is below the threshold, or with fewer than two usable
/// points, are marked excluded. A component's series is truncated at the
/// first point its magnitude drops under kProjectionTruncation.
DecayReport fit_decay(const std::vector<double>& times,
                      const std::vector<std::vector<double>>& projections,
                      const std::vector<double>& eigenvalues, double eta);

/// Builds the weighted extended kernel two ways -- (a) scaling block (i,j)
/// of the plain extended kernel by omega_i*omega_j, (b) the Gram of the
/// stacked omega-scaled row sets -- and returns their maximum relative
/// Frobenius deviation. The two constructions agree algebraically.
double verify_weighted_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                           const std::vector<double>& omegas, ntk::Granularity gran);

/// Elementwise omega_i*omega_j scaling of an extended kernel's blocks.
linalg::SymMatrix scale_blocks(const ntk::ExtendedNtk& k,
                               const std::vector<double>& omegas);

} // namespace ntklab::dynamics
