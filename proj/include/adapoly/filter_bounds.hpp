#pragma once

#include "adapoly/cheb_filter.hpp"
#include "adapoly/types.hpp"

namespace adapoly {

/// The reciprocal-sine sum J(theta) controlling the pointwise truncation
/// error of the step-function Fourier series. Piecewise: the generic branch
/// has four terms; at theta exactly alpha or beta the singular term drops
/// and the remaining three collapse to the closed special case. A vanishing
/// denominator sine in the generic branch yields +infinity.
double j_theta(double theta, double alpha, double beta);

/// The damping constant C_m = int_0^pi (sin u)^(m-1) (sin u - u cos u) / u^(m+2) du,
/// by adaptive quadrature to absolute error 1e-10. Values are cached per m.
double c_m_constant(double m);

/// Pointwise bound J(theta) / (pi (k+1)) on |g - g_k| for the undamped
/// truncated series.
double undamped_bound(double theta, int k, double alpha, double beta);

/// Pointwise bound on |g - g^m_{k_i,k}| for the damped series truncated at
/// k_i with damping referenced to k. Reduces to the undamped bound at m = 0.
double damped_bound(double theta, int k_i, int k, double m, double alpha,
                    double beta);

/// Bound on ||P - P_i||_2 given the angles arccos(l(lambda_j)) of the
/// (mapped) eigenvalues; J* is the maximum of j_theta over them.
double projector_bound(const ChebFilter& f, const Vectord& eigen_thetas, int k_i);

}  // namespace adapoly
