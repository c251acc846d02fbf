// nfcs - near-field wideband channel estimation for XL-RIS mmWave arrays
// Copyright (C) 2026 the nfcs contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Dense channel estimators and shared estimation primitives.
//
// estimate_ls2d solves the two matrix normal equations of Y = V~ H F
// separately per side; estimate_ls1d solves the same problem once over the
// vectorized model with the explicit Kronecker sensing matrix. The two are
// algebraically equivalent and kept as genuinely independent code paths so
// they can check each other. estimate_ols2d is the support-oracle variant
// restricted to the true path responses, and nmse_lower_bound evaluates the
// corresponding mean-error floor for it.

#pragma once

#include <chrono>

#include <unsupported/Eigen/KroneckerProduct>

#include "nfcs/dictionary.hpp"
#include "nfcs/measurement.hpp"

namespace nfcs
{

namespace detail
{

// Solve G X = B for Hermitian positive definite G, guarding against
// ill-conditioning with the pivoted-LDLT diagonal ratio as a cheap
// condition estimate.
inline CMat solve_hpd(const CMat &g, const CMat &b, double cond_limit, const char *who)
{
    Eigen::LDLT<CMat> ldlt(g);
    const RVec d = ldlt.vectorD().real();
    const double d_max = d.maxCoeff();
    const double d_min = d.minCoeff();
    if (!(d_min > 0.0) || d_max / d_min > cond_limit)
        throw std::runtime_error(std::string(who) + ": gram matrix ill-conditioned (cond est " +
                                 std::to_string(d_min > 0.0 ? d_max / d_min : INFINITY) + ")");
    return ldlt.solve(b);
}

inline double now_seconds()
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

} // namespace detail

// Normalized mean square error averaged over subcarriers,
// (1/K) sum_k ||H[k] - Hhat[k]||_F^2 / ||H[k]||_F^2.
inline double nmse(const std::vector<CMat> &h, const std::vector<CMat> &h_hat)
{
    if (h.empty() || h.size() != h_hat.size())
        throw std::invalid_argument("nmse: mismatched subcarrier counts");
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); k++)
    {
        const double energy = h[k].squaredNorm();
        if (!(energy > 0.0))
            throw std::invalid_argument("nmse: reference channel has zero energy");
        acc += (h[k] - h_hat[k]).squaredNorm() / energy;
    }
    return acc / double(h.size());
}

// Two-sided least squares: Hhat[k] = pinv(V~[k]) Y[k] pinv(F). Requires at
// least as many probing patterns as RIS elements and at least as many
// pilots as user elements.
inline std::vector<CMat> estimate_ls2d(const MeasurementSet &m, double cond_limit = 1e12)
{
    if (m.y.empty())
        throw std::invalid_argument("estimate_ls2d: empty measurement");
    const CMat &f = m.pilots;
    if (m.v_eff[0].rows() < m.v_eff[0].cols())
        throw std::invalid_argument("estimate_ls2d: fewer patterns than RIS elements");
    if (f.cols() < f.rows())
        throw std::invalid_argument("estimate_ls2d: fewer pilots than user elements");

    const CMat g_f = f * f.adjoint();
    std::vector<CMat> h(m.y.size());
    for (std::size_t k = 0; k < m.y.size(); k++)
    {
        const CMat &v = m.v_eff[k];
        const CMat left = detail::solve_hpd(v.adjoint() * v, v.adjoint() * m.y[k], cond_limit,
                                            "estimate_ls2d");
        h[k] = detail::solve_hpd(g_f, f * left.adjoint(), cond_limit, "estimate_ls2d").adjoint();
    }
    return h;
}

// One-sided least squares on the vectorized model: vec(Y) = (F^T kron V~) vec(H).
// Forms the Kronecker sensing matrix explicitly and solves its normal
// equations, so memory grows with (Q N_X) x (N_R N_U).
inline std::vector<CMat> estimate_ls1d(const MeasurementSet &m, double cond_limit = 1e12)
{
    if (m.y.empty())
        throw std::invalid_argument("estimate_ls1d: empty measurement");
    const CMat &f = m.pilots;
    const Eigen::Index n_r = m.v_eff[0].cols();
    const Eigen::Index n_u = f.rows();
    if (m.y[0].rows() * m.y[0].cols() < n_r * n_u)
        throw std::invalid_argument("estimate_ls1d: underdetermined vectorized system");

    const CMat f_t = f.transpose();
    std::vector<CMat> h(m.y.size());
    for (std::size_t k = 0; k < m.y.size(); k++)
    {
        const CMat f_v = Eigen::kroneckerProduct(f_t, m.v_eff[k]);
        const CVec y = Eigen::Map<const CVec>(m.y[k].data(), m.y[k].size());
        const CVec sol =
            detail::solve_hpd(f_v.adjoint() * f_v, f_v.adjoint() * y, cond_limit, "estimate_ls1d");
        h[k] = Eigen::Map<const CMat>(sol.data(), n_r, n_u);
    }
    return h;
}

// Rank-P factorization of the measurements: per subcarrier the thin SVD
// Y ~= T_R S T_U^H truncated to P terms, split symmetrically so that
// ris.col(p) user.col(p)^H sums back to the truncation. The RIS-side factor
// lives in the column space spanned by the probed path responses, the
// user-side one in the row space, which is what the atom matching consumes.
struct SubspaceFactors
{
    std::vector<CMat> ris;  // per-k Q x P
    std::vector<CMat> user; // per-k N_X x P
    bool rank_deficient = false;
};

inline SubspaceFactors svd_subspace(const MeasurementSet &m, int n_paths)
{
    if (m.y.empty())
        throw std::invalid_argument("svd_subspace: empty measurement");
    if (n_paths < 1)
        throw std::invalid_argument("svd_subspace: need at least one path");
    if (n_paths > std::min(m.y[0].rows(), m.y[0].cols()))
        throw std::invalid_argument("svd_subspace: more paths than the measurement rank allows");

    SubspaceFactors out;
    out.ris.resize(m.y.size());
    out.user.resize(m.y.size());
    for (std::size_t k = 0; k < m.y.size(); k++)
    {
        Eigen::BDCSVD<CMat> svd(m.y[k], Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec s = svd.singularValues();
        if (s(n_paths - 1) <= s(0) * 1e-12)
            out.rank_deficient = true;
        const RVec root = s.head(n_paths).cwiseSqrt();
        out.ris[k] = svd.matrixU().leftCols(n_paths) * root.asDiagonal();
        out.user[k] = svd.matrixV().leftCols(n_paths) * root.asDiagonal();
    }
    return out;
}

// Complex Pearson correlation coefficient with the first argument
// conjugated: rho = <x - mean(x), y - mean(y)> / (||.|| ||.||). Invariant in
// modulus under nonzero affine rescaling of either argument.
inline cxd correlation_coefficient(const CVec &x, const CVec &y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("correlation_coefficient: need two vectors of equal size >= 2");
    const cxd mx = x.mean();
    const cxd my = y.mean();
    const CVec xc = x.array() - mx;
    const CVec yc = y.array() - my;
    const double denom = xc.norm() * yc.norm();
    if (!(denom > 0.0))
        throw std::invalid_argument("correlation_coefficient: constant input has no correlation");
    return xc.dot(yc) / denom;
}

// Support-oracle two-sided least squares: regression on the true path
// responses (exact spherical on the RIS side, planar on the user side),
// then channel rebuild from the fitted P x P coupling matrix.
inline std::vector<CMat> estimate_ols2d(const MeasurementSet &m, const UpaShape &ris,
                                        const UpaShape &user, const CarrierGrid &grid,
                                        const std::vector<ChannelPath> &paths,
                                        double cond_limit = 1e12)
{
    if (paths.empty())
        throw std::invalid_argument("estimate_ols2d: no paths given");
    if (m.y.size() != std::size_t(grid.n_subcarriers))
        throw std::invalid_argument("estimate_ols2d: measurement does not match carrier grid");

    const int p = int(paths.size());
    std::vector<CMat> h(m.y.size());
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const double f_k = grid.freq(k);
        CMat b(ris.size(), p), a(user.size(), p);
        for (int i = 0; i < p; i++)
        {
            b.col(i) = exact_spherical_response(ris, f_k, paths[i].ris_point);
            a.col(i) = planar_response(user, f_k, paths[i].user_virt_elev, paths[i].user_virt_azim);
        }
        const CMat phi_r = m.v_eff[k] * b;
        const CMat phi_u = m.pilots.adjoint() * a;
        const CMat left = detail::solve_hpd(phi_r.adjoint() * phi_r, phi_r.adjoint() * m.y[k],
                                            cond_limit, "estimate_ols2d");
        const CMat xi = detail::solve_hpd(phi_u.adjoint() * phi_u, (left * phi_u).adjoint(),
                                          cond_limit, "estimate_ols2d")
                            .adjoint();
        h[k] = b * xi * a.adjoint();
    }
    return h;
}

// Mean-NMSE floor of the support-oracle estimator,
//
//   K sigma_n^2 P^5 / (kappa N_R N_U sum_k gamma_k),
//
// gamma_k = lmax(B^H B) lmax(A^H A) ||Phi_U||_F^2 ||Phi_R||_F^2
//           / (lmin(B^H B) lmin(A^H A)),
//
// with B, A the true path response matrices and Phi_R, Phi_U their probed
// images. kappa is the total path power sum |beta_p|^2.
inline double nmse_lower_bound(const MeasurementSet &m, const UpaShape &ris, const UpaShape &user,
                               const CarrierGrid &grid, const std::vector<ChannelPath> &paths,
                               double kappa)
{
    if (paths.empty())
        throw std::invalid_argument("nmse_lower_bound: no paths given");
    if (!(kappa > 0.0))
        throw std::invalid_argument("nmse_lower_bound: kappa must be positive");
    if (m.y.size() != std::size_t(grid.n_subcarriers))
        throw std::invalid_argument("nmse_lower_bound: measurement does not match carrier grid");

    const int p = int(paths.size());
    double gamma_sum = 0.0;
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const double f_k = grid.freq(k);
        CMat b(ris.size(), p), a(user.size(), p);
        for (int i = 0; i < p; i++)
        {
            b.col(i) = exact_spherical_response(ris, f_k, paths[i].ris_point);
            a.col(i) = planar_response(user, f_k, paths[i].user_virt_elev, paths[i].user_virt_azim);
        }
        Eigen::SelfAdjointEigenSolver<CMat> eig_b(b.adjoint() * b);
        Eigen::SelfAdjointEigenSolver<CMat> eig_a(a.adjoint() * a);
        const double lmin = eig_b.eigenvalues().minCoeff() * eig_a.eigenvalues().minCoeff();
        if (!(lmin > 0.0))
            throw std::runtime_error("nmse_lower_bound: collinear path responses");
        const double lmax = eig_b.eigenvalues().maxCoeff() * eig_a.eigenvalues().maxCoeff();
        const double phi_r = (m.v_eff[k] * b).squaredNorm();
        const double phi_u = (m.pilots.adjoint() * a).squaredNorm();
        gamma_sum += lmax / lmin * phi_r * phi_u;
    }
    const double p5 = std::pow(double(p), 5.0);
    return double(grid.n_subcarriers) * m.sigma_n2 * p5 /
           (kappa * double(ris.size()) * double(user.size()) * gamma_sum);
}

} // namespace nfcs
