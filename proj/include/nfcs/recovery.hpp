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

// Sparse channel recovery.
//
// mmpsr implements multi-measurement path-support recovery: factor the
// measurements into per-path subspace vectors (SVD), match each of them
// against the probed dictionary atoms jointly over all subcarriers, refine
// the matched labels on a local continuum grid, and rebuild the channel by
// a two-sided least-squares fit on the recovered supports. Matching scores
// either by the centered correlation coefficient, which is invariant to the
// unknown per-column scaling the probing introduces, or by the plain inner
// product for comparison.
//
// estimate_komp is the per-subcarrier greedy baseline: orthogonal matching
// pursuit on the vectorized model whose sensing matrix is the Kronecker
// product of the pilot-projected user dictionary and the probed RIS
// dictionary. The Kronecker product is applied in factored form, but its
// G_U * G_R correlation table is materialized, so a budget guard rejects
// dictionary pairs that would not fit.

#pragma once

#include <algorithm>
#include <utility>

#include "nfcs/estimators.hpp"

namespace nfcs
{

enum class AtomMatcher
{
    correlation,  // centered complex Pearson, scored by modulus
    inner_product // raw |atom^H target|
};

struct RefineOptions
{
    bool enabled = true;
    // Stepsizes of the local refinement grids. Angle steps are in virtual
    // angle units; the range step is the fraction of the matched
    // direction's ring step used as the inverse-distance stepsize. Each
    // grid spans the matched atom's own cell (half a grid bin per angle
    // axis, half a ring step in inverse range) and always contains the
    // matched label itself, jointly over all axes of a side.
    double step_elev = 0.005;
    double step_azim = 0.005;
    double step_user_elev = 0.005;
    double step_user_azim = 0.005;
    double step_inv_r = 0.005;
};

struct StageTiming
{
    double sensing_s = 0.0; // probed dictionary construction
    double svd_s = 0.0;
    double match_s = 0.0; // scoring + support selection only
    double refine_s = 0.0;
    double rebuild_s = 0.0;
};

struct EstimationResult
{
    std::vector<CMat> h_hat;            // per-k N_R x N_U
    std::vector<AtomLabel> ris_support; // per path; refined when refinement is on
    std::vector<AtomLabel> user_support;
    std::vector<int> ris_coarse; // matched dictionary column indices
    std::vector<int> user_coarse;
    StageTiming timing;
    bool rank_deficient = false;
};

// Matcher scores of every probed dictionary column against the per-path
// target vectors, accumulated over subcarriers:
// out(g, p) = sum_k score(phi[k].col(g), targets[k].col(p)). Columns with
// no variance contribute zero under the correlation matcher.
inline RMat atom_match_scores(const std::vector<CMat> &phi, const std::vector<CMat> &targets,
                              AtomMatcher matcher)
{
    if (phi.empty() || phi.size() != targets.size())
        throw std::invalid_argument("atom_match_scores: mismatched subcarrier counts");
    const Eigen::Index g = phi[0].cols();
    const Eigen::Index p = targets[0].cols();
    RMat scores = RMat::Zero(g, p);
    for (std::size_t k = 0; k < phi.size(); k++)
    {
        const Eigen::Index q = phi[k].rows();
        if (targets[k].rows() != q)
            throw std::invalid_argument("atom_match_scores: row mismatch between atoms and targets");
        const CMat raw = phi[k].adjoint() * targets[k]; // g x p
        if (matcher == AtomMatcher::inner_product)
        {
            scores += raw.cwiseAbs();
            continue;
        }
        const CVec phi_mean = phi[k].colwise().mean();
        const CVec t_mean = targets[k].colwise().mean();
        const RVec phi_cnorm =
            (phi[k].colwise().squaredNorm().transpose().real() -
             double(q) * phi_mean.cwiseAbs2())
                .cwiseMax(0.0)
                .cwiseSqrt();
        const RVec t_cnorm = (targets[k].colwise().squaredNorm().transpose().real() -
                              double(q) * t_mean.cwiseAbs2())
                                 .cwiseMax(0.0)
                                 .cwiseSqrt();
        // centered dot = raw - q * conj(mean_phi) * mean_t
        const CMat centered = raw - double(q) * phi_mean.conjugate() * t_mean.transpose();
        for (Eigen::Index j = 0; j < p; j++)
            for (Eigen::Index i = 0; i < g; i++)
            {
                const double denom = phi_cnorm(i) * t_cnorm(j);
                if (denom > 0.0)
                    scores(i, j) += std::abs(centered(i, j)) / denom;
            }
    }
    return scores;
}

// Probed dictionaries, Phi_R[k] = V~[k] B_R[k] and Phi_U[k] = F^H A_U[k].
// Reusable across measurement sets that share the schedule and backhaul.
struct MmpsrWorkspace
{
    std::vector<CMat> phi_ris;  // per-k Q x G_R
    std::vector<CMat> phi_user; // per-k N_X x G_U
};

inline MmpsrWorkspace make_mmpsr_workspace(const MeasurementSet &m, const SphericalDictionary &rd,
                                           const AngularDictionary &ud)
{
    if (m.v_eff.size() != std::size_t(rd.grid.n_subcarriers) ||
        m.v_eff.size() != ud.atoms.size())
        throw std::invalid_argument("make_mmpsr_workspace: dictionaries do not match measurement");
    MmpsrWorkspace w;
    w.phi_ris.resize(m.v_eff.size());
    w.phi_user.resize(m.v_eff.size());
    const int block = 1024;
    for (std::size_t k = 0; k < m.v_eff.size(); k++)
    {
        CMat phi(m.v_eff[k].rows(), rd.size());
        for (int g0 = 0; g0 < rd.size(); g0 += block)
        {
            const int n = std::min(block, rd.size() - g0);
            phi.middleCols(g0, n).noalias() = m.v_eff[k] * rd.atom_block(int(k), g0, n);
        }
        w.phi_ris[k] = std::move(phi);
        w.phi_user[k] = m.pilots.adjoint() * ud.atoms[k];
    }
    return w;
}

namespace detail
{

inline int best_unused(const RVec &score, const std::vector<char> &used)
{
    int best = -1;
    double best_val = -1.0;
    for (Eigen::Index i = 0; i < score.size(); i++)
        if (!used[i] && score(i) > best_val)
        {
            best = int(i);
            best_val = score(i);
        }
    if (best < 0)
        throw std::runtime_error("mmpsr: dictionary exhausted while resolving support collisions");
    return best;
}

// Symmetric refinement axis around `center`, clipped to [lo, hi]. The
// center itself is always a sample, so refinement can never do worse than
// the coarse match.
inline std::vector<double> refine_axis(double center, double halfwidth, double step, double lo,
                                       double hi)
{
    std::vector<double> v;
    const int n = (step > 0.0 && std::isfinite(halfwidth)) ? int(halfwidth / step + 1e-9) : 0;
    for (int j = -n; j <= n; j++)
    {
        const double x = center + double(j) * step;
        if (x >= lo && x <= hi)
            v.push_back(x);
    }
    return v;
}

// Joint score of candidate labels against one path's target vectors,
// accumulated over subcarriers; proj[k] maps atom columns into measurement
// space (the probing matrix on the RIS side, pilots' adjoint on the user
// side).
template <typename Proj>
RVec score_candidates(const UpaShape &shape, const CarrierGrid &grid,
                      const std::vector<AtomLabel> &cands, const std::vector<CMat> &targets, int p,
                      AtomMatcher matcher, Proj &&proj)
{
    std::vector<CMat> phi(grid.n_subcarriers);
    std::vector<CMat> t(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        phi[k] = proj(k, atoms_at(shape, grid.freq(k), cands));
        t[k] = targets[k].col(p);
    }
    return atom_match_scores(phi, t, matcher).col(0);
}

} // namespace detail

// Two-sided least-squares channel rebuild on fixed supports: fit the P x P
// coupling matrix of Y[k] = Phi_R Xi Phi_U^H per subcarrier and expand it
// through the label atoms.
inline std::vector<CMat> rebuild_from_labels(const MeasurementSet &m, const UpaShape &ris,
                                             const UpaShape &user, const CarrierGrid &grid,
                                             const std::vector<AtomLabel> &ris_labels,
                                             const std::vector<AtomLabel> &user_labels,
                                             double cond_limit = 1e12)
{
    if (ris_labels.empty() || ris_labels.size() != user_labels.size())
        throw std::invalid_argument("rebuild_from_labels: need matching nonempty label lists");
    std::vector<CMat> h(m.y.size());
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const CMat b = atoms_at(ris, grid.freq(k), ris_labels);
        const CMat a = atoms_at(user, grid.freq(k), user_labels);
        const CMat phi_r = m.v_eff[k] * b;
        const CMat phi_u = m.pilots.adjoint() * a;
        const CMat left = detail::solve_hpd(phi_r.adjoint() * phi_r, phi_r.adjoint() * m.y[k],
                                            cond_limit, "rebuild_from_labels");
        const CMat xi = detail::solve_hpd(phi_u.adjoint() * phi_u, (left * phi_u).adjoint(),
                                          cond_limit, "rebuild_from_labels")
                            .adjoint();
        h[k] = b * xi * a.adjoint();
    }
    return h;
}

inline EstimationResult mmpsr(const MeasurementSet &m, const SphericalDictionary &rd,
                              const AngularDictionary &ud, int n_paths, AtomMatcher matcher,
                              const RefineOptions &opt, const MmpsrWorkspace &ws)
{
    if (n_paths < 1)
        throw std::invalid_argument("mmpsr: need at least one path");
    if (n_paths > rd.size() || n_paths > ud.size())
        throw std::invalid_argument("mmpsr: more paths than dictionary atoms");

    EstimationResult res;
    const CarrierGrid &grid = rd.grid;

    double t0 = detail::now_seconds();
    const SubspaceFactors sub = svd_subspace(m, n_paths);
    res.rank_deficient = sub.rank_deficient;
    res.timing.svd_s = detail::now_seconds() - t0;

    // Joint atom matching, resolving duplicate picks to the next-best atom
    // per side so the rebuild regressors stay independent.
    t0 = detail::now_seconds();
    const RMat score_r = atom_match_scores(ws.phi_ris, sub.ris, matcher);
    const RMat score_u = atom_match_scores(ws.phi_user, sub.user, matcher);
    std::vector<char> used_r(rd.size(), 0), used_u(ud.size(), 0);
    res.ris_coarse.resize(n_paths);
    res.user_coarse.resize(n_paths);
    for (int p = 0; p < n_paths; p++)
    {
        res.ris_coarse[p] = detail::best_unused(score_r.col(p), used_r);
        used_r[res.ris_coarse[p]] = 1;
        res.user_coarse[p] = detail::best_unused(score_u.col(p), used_u);
        used_u[res.user_coarse[p]] = 1;
    }
    res.timing.match_s = detail::now_seconds() - t0;

    // Independent per-side refinement on a local grid around each matched
    // label; the grid spans the matched cell, so the refined label stays
    // within half a coarse bin of the coarse one.
    t0 = detail::now_seconds();
    res.ris_support.resize(n_paths);
    res.user_support.resize(n_paths);
    for (int p = 0; p < n_paths; p++)
    {
        AtomLabel rl = rd.labels[res.ris_coarse[p]];
        AtomLabel ul = ud.labels[res.user_coarse[p]];
        if (opt.enabled)
        {
            const double half_e = 1.0 / double(rd.elev_grid.size());
            const double half_a = 1.0 / double(rd.azim_grid.size());
            const double ring = ring_step_at(rd, rl);
            const std::vector<double> ves = detail::refine_axis(rl.virt_elev, half_e, opt.step_elev, -1.0, 1.0);
            const std::vector<double> vas = detail::refine_axis(rl.virt_azim, half_a, opt.step_azim, -1.0, 1.0);
            const bool has_ring = std::isfinite(ring) && ring > 0.0;
            const std::vector<double> irs = detail::refine_axis(
                rl.inv_r, has_ring ? 0.5 * ring : 0.0,
                has_ring ? opt.step_inv_r * ring : 0.0, 0.0,
                std::numeric_limits<double>::infinity());
            std::vector<AtomLabel> cands;
            cands.reserve(ves.size() * vas.size() * irs.size());
            for (double ve : ves)
                for (double va : vas)
                    for (double ir : irs)
                        cands.push_back(AtomLabel{ve, va, ir, rl.i_z, rl.i_y, rl.i_r});
            const RVec sc = detail::score_candidates(
                rd.shape, grid, cands, sub.ris, p, matcher,
                [&](int k, const CMat &b) { return CMat(m.v_eff[k] * b); });
            Eigen::Index best;
            sc.maxCoeff(&best);
            rl = cands[best];

            const double uhalf_e = 1.0 / double(ud.elev_grid.size());
            const double uhalf_a = 1.0 / double(ud.azim_grid.size());
            const std::vector<double> uves =
                detail::refine_axis(ul.virt_elev, uhalf_e, opt.step_user_elev, -1.0, 1.0);
            const std::vector<double> uvas =
                detail::refine_axis(ul.virt_azim, uhalf_a, opt.step_user_azim, -1.0, 1.0);
            std::vector<AtomLabel> ucands;
            ucands.reserve(uves.size() * uvas.size());
            for (double ve : uves)
                for (double va : uvas)
                    ucands.push_back(AtomLabel{ve, va, 0.0, ul.i_z, ul.i_y, 0});
            const RVec su = detail::score_candidates(
                ud.shape, grid, ucands, sub.user, p, matcher,
                [&](int, const CMat &a) { return CMat(m.pilots.adjoint() * a); });
            su.maxCoeff(&best);
            ul = ucands[best];
        }
        res.ris_support[p] = rl;
        res.user_support[p] = ul;
    }
    res.timing.refine_s = opt.enabled ? detail::now_seconds() - t0 : 0.0;

    t0 = detail::now_seconds();
    res.h_hat = rebuild_from_labels(m, rd.shape, ud.shape, grid, res.ris_support, res.user_support);
    res.timing.rebuild_s = detail::now_seconds() - t0;
    return res;
}

inline EstimationResult mmpsr(const MeasurementSet &m, const SphericalDictionary &rd,
                              const AngularDictionary &ud, int n_paths, AtomMatcher matcher,
                              const RefineOptions &opt = {})
{
    const double t0 = detail::now_seconds();
    const MmpsrWorkspace ws = make_mmpsr_workspace(m, rd, ud);
    EstimationResult res = mmpsr(m, rd, ud, n_paths, matcher, opt, ws);
    res.timing.sensing_s = detail::now_seconds() - t0 - res.timing.svd_s - res.timing.match_s -
                           res.timing.refine_s - res.timing.rebuild_s;
    return res;
}

// Per-subcarrier orthogonal matching pursuit on the vectorized model. The
// recorded supports are those of the first subcarrier (supports may differ
// per subcarrier since each one is pursued independently).
inline EstimationResult estimate_komp(const MeasurementSet &m, const SphericalDictionary &rd,
                                      const AngularDictionary &ud, int n_paths,
                                      std::size_t max_atom_product = 8000000)
{
    if (n_paths < 0)
        throw std::invalid_argument("estimate_komp: negative path count");
    if (std::size_t(rd.size()) * std::size_t(ud.size()) > max_atom_product)
        throw std::runtime_error("estimate_komp: dictionary product exceeds the memory budget");

    EstimationResult res;
    const CarrierGrid &grid = rd.grid;
    res.h_hat.assign(m.y.size(), CMat::Zero(rd.shape.size(), ud.shape.size()));
    if (n_paths == 0)
        return res;

    const double t0 = detail::now_seconds();
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const CMat b_atoms = rd.atom_matrix(k);
        const CMat phi_b = m.v_eff[k] * b_atoms;                        // Q x G_R
        const CMat a_fac = (ud.atoms[k].adjoint() * m.pilots).transpose(); // N_X x G_U
        const RVec nb = phi_b.colwise().norm();
        const RVec na = a_fac.colwise().norm();

        CMat residual = m.y[k];
        std::vector<std::pair<int, int>> picks; // (g_r, g_u)
        CVec coef;
        for (int it = 0; it < n_paths; it++)
        {
            const CMat corr = phi_b.adjoint() * residual * a_fac.conjugate(); // G_R x G_U
            int best_r = -1, best_u = -1;
            double best_val = -1.0;
            for (int gu = 0; gu < int(corr.cols()); gu++)
                for (int gr = 0; gr < int(corr.rows()); gr++)
                {
                    const double denom = nb(gr) * na(gu);
                    if (!(denom > 0.0))
                        continue;
                    const double val = std::abs(corr(gr, gu)) / denom;
                    if (val > best_val &&
                        std::find(picks.begin(), picks.end(), std::make_pair(gr, gu)) == picks.end())
                    {
                        best_val = val;
                        best_r = gr;
                        best_u = gu;
                    }
                }
            if (best_r < 0)
                break;
            picks.emplace_back(best_r, best_u);

            // LS over the selected Kronecker columns via their small gram.
            const int s = int(picks.size());
            CMat gram(s, s);
            CVec rhs(s);
            for (int i = 0; i < s; i++)
            {
                const auto [ri, ui] = picks[i];
                for (int j = 0; j < s; j++)
                {
                    const auto [rj, uj] = picks[j];
                    gram(i, j) = a_fac.col(ui).dot(a_fac.col(uj)) * phi_b.col(ri).dot(phi_b.col(rj));
                }
                rhs(i) = (phi_b.col(ri).adjoint() * m.y[k] * a_fac.col(ui).conjugate())(0);
            }
            coef = detail::solve_hpd(gram, rhs, 1e12, "estimate_komp");
            residual = m.y[k];
            for (int i = 0; i < s; i++)
                residual.noalias() -=
                    coef(i) * phi_b.col(picks[i].first) * a_fac.col(picks[i].second).transpose();
        }

        CMat hk = CMat::Zero(rd.shape.size(), ud.shape.size());
        for (int i = 0; i < int(picks.size()); i++)
            hk.noalias() += coef(i) * b_atoms.col(picks[i].first) *
                            ud.atoms[k].col(picks[i].second).adjoint();
        res.h_hat[k] = std::move(hk);

        if (k == 0)
        {
            for (const auto &[gr, gu] : picks)
            {
                res.ris_coarse.push_back(gr);
                res.user_coarse.push_back(gu);
                res.ris_support.push_back(rd.labels[gr]);
                res.user_support.push_back(ud.labels[gu]);
            }
        }
    }
    res.timing.match_s = detail::now_seconds() - t0;
    return res;
}

} // namespace nfcs
