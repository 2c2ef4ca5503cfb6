"""Ground-state energy, density-to-potential inversion, and the
universal functional.

The inversion maximizes the concave dual G(v) = E(v) - <v, target> over
sum-zero potentials.  A supergradient of G at v is rho_D - target for any
ground density rho_D; the implementation stabilizes the choice by taking
the projection of the target onto the current (cluster-widened) ground
region, follows the alpha_0/sqrt(t) schedule far from optimality, and
accelerates once close: a Levenberg-damped Newton step on rho(v) = target
in the smooth regime, and a first-order degeneracy pin (equalizing the
ground cluster of the perturbed Hamiltonian, a least-squares solve against
the factor matrix) plus tangent ascent along the degeneracy-preserving
manifold in the degenerate regime.

All per-sample state lives in arrays, so one code path serves both the
single inversion and the Monte-Carlo ratio estimate, which runs the same
lockstep iteration over every sample at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .degmap import DegeneracyClass, build_class
from .errors import DomainError
from .fock import FockBasis, ManyBodyOperator, add_interaction, enumerate_basis, lift_one_body
from .lattice import Graph, OneBodyOperator, Potential, laplacian
from .spectra import Eigenspace, ground_eigenspace


@dataclass(frozen=True)
class SystemSpec:
    """A fixed internal Hamiltonian: graph Laplacian plus optional
    density-density interaction, at particle number N."""

    graph: Graph
    N: int
    W: np.ndarray | None = None
    deg_tol: float = 1e-9
    rank_tol: float = 1e-8

    @cached_property
    def basis(self) -> FockBasis:
        return enumerate_basis(self.graph.M, self.N)

    @cached_property
    def h0(self) -> OneBodyOperator:
        return laplacian(self.graph)

    @cached_property
    def H0(self) -> ManyBodyOperator:
        H = lift_one_body(self.h0, self.basis)
        if self.W is not None:
            H = add_interaction(H, self.W)
        return H

    @property
    def M(self) -> int:
        return self.graph.M


def hamiltonian(spec: SystemSpec, v) -> ManyBodyOperator:
    """Lifted H0 + diagonal lift of the potential v."""
    v = _as_vector(spec, v)
    diag = spec.basis.occupations @ v
    return ManyBodyOperator(spec.H0.H + np.diag(diag), spec.basis)


def energy(spec: SystemSpec, v) -> float:
    """Ground-state energy E(v)."""
    H = hamiltonian(spec, v)
    return float(np.linalg.eigvalsh(H.H)[0])


def ground_class(spec: SystemSpec, v, deg_tol: float | None = None,
                 rank_tol: float | None = None) -> tuple[Eigenspace, DegeneracyClass]:
    """Ground eigenspace and its degeneracy class at potential v."""
    es = ground_eigenspace(hamiltonian(spec, v), deg_tol or spec.deg_tol)
    return es, build_class(es, spec.basis, rank_tol or spec.rank_tol)


def _as_vector(spec: SystemSpec, v) -> np.ndarray:
    arr = v.v if isinstance(v, Potential) else np.asarray(v, dtype=float)
    arr = arr.reshape(-1)
    if arr.size != spec.M:
        raise DomainError(f"potential length {arr.size} != M={spec.M}")
    return arr


@dataclass(frozen=True)
class InversionOptions:
    tol: float = 1e-7
    max_iter: int = 10000
    alpha0: float = 1.0
    deg_tol: float = 1e-6          # degeneracy verdict at the solution
    boundary_margin: float = 1e-6
    newton: bool = True            # curvature acceleration on/off
    g_cap: int = 6                 # largest cluster size handled explicitly
    history_stride: int = 50


@dataclass(frozen=True)
class InversionResult:
    v_star: Potential
    converged: bool
    residual: float
    g_at_vstar: int
    boundary_flag: bool
    iterations: int
    witness: np.ndarray | None = None
    v_norm_history: tuple[float, ...] = ()


# ---------------------------------------------------------------------------
# batched spectrahedron projection (distance from targets to current regions)
# ---------------------------------------------------------------------------

def _proj_spectrahedron_batch(A: np.ndarray) -> np.ndarray:
    g = A.shape[1]
    w, V = np.linalg.eigh(A)
    u = np.sort(w, axis=1)[:, ::-1]
    css = np.cumsum(u, axis=1)
    ks = np.arange(1, g + 1)[None, :]
    cond = u - (css - 1) / ks > 0
    kidx = np.where(cond, np.arange(g)[None, :], -1).max(axis=1)
    B = A.shape[0]
    tau = (css[np.arange(B), kidx] - 1) / (kidx + 1)
    lam = np.maximum(w - tau[:, None], 0.0)
    return np.einsum("bik,bk,bjk->bij", V, lam, V)


def _mvec_batch(A: np.ndarray, g: int, pairs) -> np.ndarray:
    parts = [A[:, np.arange(g), np.arange(g)]]
    if pairs:
        parts.append(np.stack([A[:, k, l] for k, l in pairs], axis=1))
    return np.concatenate(parts, axis=1)


def _project_targets(P: np.ndarray, t: np.ndarray, A0: np.ndarray, n_iter: int):
    """FISTA for min_A |P m(A) - t| over PSD trace-one A, batched."""
    B, M, nc = P.shape
    g = A0.shape[1]
    pairs = [(k, l) for k in range(g) for l in range(k + 1, g)]
    Lip = np.maximum((P ** 2).sum(axis=(1, 2)), 1e-30)
    A = A0.copy()
    Y = A0.copy()
    tk = np.ones(B)
    resA = np.linalg.norm(np.einsum("bmc,bc->bm", P, _mvec_batch(A, g, pairs)) - t, axis=1)
    for _ in range(n_iter):
        r = np.einsum("bmc,bc->bm", P, _mvec_batch(Y, g, pairs)) - t
        c = np.einsum("bmc,bm->bc", P, r)
        G = np.zeros((B, g, g))
        G[:, np.arange(g), np.arange(g)] = c[:, :g]
        for idx, (k, l) in enumerate(pairs):
            G[:, k, l] = G[:, l, k] = 0.5 * c[:, g + idx]
        Anew = _proj_spectrahedron_batch(Y - G / Lip[:, None, None])
        resN = np.linalg.norm(
            np.einsum("bmc,bc->bm", P, _mvec_batch(Anew, g, pairs)) - t, axis=1)
        tknew = (1 + np.sqrt(1 + 4 * tk ** 2)) / 2
        worse = resN > resA
        beta = np.where(worse, 0.0, (tk - 1) / tknew)
        tk = np.where(worse, 1.0, tknew)
        Y = Anew + beta[:, None, None] * (Anew - A)
        A, resA = Anew, resN
    proj = np.einsum("bmc,bc->bm", P, _mvec_batch(A, g, pairs))
    return A, proj, np.linalg.norm(proj - t, axis=1)




def _project_disc_g2(Fd: np.ndarray, Fo: np.ndarray, t: np.ndarray):
    """Exact distance to a g=2 region (affine image of the unit disc).

    Region: c + p*a + q*b over p^2 + q^2 <= 1 with c = (rho_1 + rho_2)/2,
    a = (rho_1 - rho_2)/2, b = rho_12/2.  Interior solve is 2x2 least
    squares; boundary solve is the secular equation via Newton bisection.
    Returns (A, proj, resid) with A the witness ensemble matrix.
    """
    c = 0.5 * (Fd[:, 0] + Fd[:, 1])
    a = 0.5 * (Fd[:, 0] - Fd[:, 1])
    b = 0.5 * Fo[:, 0]
    r = t - c
    g11 = np.einsum("bm,bm->b", a, a)
    g22 = np.einsum("bm,bm->b", b, b)
    g12 = np.einsum("bm,bm->b", a, b)
    r1 = np.einsum("bm,bm->b", a, r)
    r2 = np.einsum("bm,bm->b", b, r)
    G = np.stack([np.stack([g11, g12], -1), np.stack([g12, g22], -1)], 1)
    beta = np.stack([r1, r2], -1)
    d, V = np.linalg.eigh(G)                      # ascending eigenvalues
    bt = np.einsum("bij,bi->bj", V, beta)         # beta in eigenbasis
    d = np.maximum(d, 0.0)
    # interior candidate (pseudo-inverse in the eigenbasis)
    widt = np.where(d > 1e-14 * np.maximum(d[:, 1:], 1e-300), bt / np.maximum(d, 1e-300), 0.0)
    inside = (widt ** 2).sum(axis=1) <= 1.0
    # boundary: ||w(lam)||^2 = sum bt_i^2/(d_i+lam)^2 = 1, monotone in lam
    lam_lo = np.zeros(len(d))
    lam_hi = np.maximum(np.linalg.norm(bt, axis=1) - d[:, 0], 1e-12)
    for _ in range(60):
        lam = 0.5 * (lam_lo + lam_hi)
        val = (bt ** 2 / (d + lam[:, None]) ** 2).sum(axis=1)
        hib = val > 1.0
        lam_lo = np.where(hib, lam, lam_lo)
        lam_hi = np.where(hib, lam_hi, lam)
    lam = 0.5 * (lam_lo + lam_hi)
    wbnd = bt / (d + lam[:, None])
    nb = np.maximum(np.linalg.norm(wbnd, axis=1), 1e-300)
    wbnd = wbnd / nb[:, None]
    wsol = np.where(inside[:, None], widt, wbnd)
    w = np.einsum("bij,bj->bi", V, wsol)          # back from eigenbasis
    proj = c + w[:, 0:1] * a + w[:, 1:2] * b
    resid = np.linalg.norm(proj - t, axis=1)
    A = np.empty((len(d), 2, 2))
    A[:, 0, 0] = 0.5 * (1 + w[:, 0])
    A[:, 1, 1] = 0.5 * (1 - w[:, 0])
    A[:, 0, 1] = A[:, 1, 0] = 0.5 * w[:, 1]
    return A, proj, resid

# ---------------------------------------------------------------------------
# the lockstep engine
# ---------------------------------------------------------------------------

_SPREAD_PINNED = 1e-8     # relative cluster spread counting as "on manifold"
_SPREAD_PIN_MAX = 5e-2    # largest spread the pin jump may close
_PIN_RESID_MAX = 5e-2     # only pin when the target is plausibly in-region
_NEWTON_RESID_MAX = 2.0
_STALL_ITERS = 80
_ESCAPE_COOLDOWN = 40


@dataclass
class BatchResult:
    v: np.ndarray
    converged: np.ndarray
    g_star: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    witness_A: np.ndarray
    witness_g: np.ndarray
    v_norm_history: list


def invert_batch(spec: SystemSpec, targets: np.ndarray,
                 opts: InversionOptions = InversionOptions(),
                 track_history: bool = False) -> BatchResult:
    """Invert every row of `targets` in lockstep.

    Per-sample trajectories are independent, so chunking or threading over
    samples cannot change the result.  Each active sample is in one of two
    regimes per iteration: smooth (unique ground state within the adaptive
    cluster window; damped-Newton or schedule steps on rho(v) = target) or
    captured (window sees a cluster; the target is projected onto the
    cluster region, the potential is pinned onto the degeneracy manifold,
    and a monotone 1-d march/bisection moves along the manifold tangent,
    exploiting concavity of the dual along degeneracy-preserving lines).
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    B, M = targets.shape
    if M != spec.M:
        raise DomainError(f"targets have dimension {M}, expected {spec.M}")
    O = spec.basis.occupations
    L = spec.basis.L
    H0 = spec.H0.H
    gcap = min(opts.g_cap, L)

    v = np.zeros((B, M))
    conv = np.zeros(B, bool)
    g_star = np.ones(B, int)
    resid = np.full(B, np.inf)
    iters = np.zeros(B, int)
    act = np.ones(B, bool)
    A_warm = np.zeros((B, gcap, gcap))
    warm_g = np.zeros(B, int)
    wit_A = np.zeros((B, gcap, gcap))
    wit_g = np.ones(B, int)
    trust = np.full(B, 0.5)
    prev_rn0 = np.full(B, np.inf)
    prev_v = np.zeros((B, M))
    took_newton = np.zeros(B, bool)
    best_res = np.full(B, np.inf)
    best_v = np.zeros((B, M))
    last_gain = np.zeros(B, int)
    nopin = np.zeros(B, int)
    # 1-d manifold walk state
    pin0 = np.zeros(B, int)        # tight pins on isolated points without membership
    wdir = np.zeros((B, M))        # unit tangent being marched
    have_dir = np.zeros(B, bool)
    anchor = np.zeros((B, M))      # origin of the s coordinate
    mstep = np.full(B, 0.3)        # current march step
    sprev = np.zeros(B)
    phiprev = np.zeros(B)
    have_phi = np.zeros(B, bool)
    blo = np.zeros(B)              # bracket with phi(blo) > 0 > phi(bhi)
    bhi = np.zeros(B)
    have_br = np.zeros(B, bool)
    history = []
    rngL = np.arange(L)

    def _reset_walk(rows):
        have_dir[rows] = False
        have_phi[rows] = False
        have_br[rows] = False
        mstep[rows] = 0.3
        pin0[rows] = 0

    it = 0
    while act.any() and it < opts.max_iter:
        it += 1
        idx = np.where(act)[0]
        vB = v[idx]
        tB = targets[idx]
        nb = len(idx)
        H = np.broadcast_to(H0, (nb, L, L)).copy()
        H[:, rngL, rngL] += (O @ vB.T).T
        w, U = np.linalg.eigh(H)
        scale = np.maximum(1.0, np.abs(w[:, 0]))
        spread = w - w[:, 0:1]
        alpha = opts.alpha0 / math.sqrt(it)
        window = min(0.3, max(1e-4, 0.2 * alpha))
        g_wide = np.minimum((spread <= window * scale[:, None]).sum(axis=1), gcap)
        g_strict = np.minimum((spread <= opts.deg_tol * scale[:, None]).sum(axis=1), gcap)
        g_wide = np.where(nopin[idx] > 0, 1, g_wide)

        psi0 = U[:, :, 0]
        rho0 = np.einsum("lm,bl->bm", O, psi0 ** 2)
        rn0 = np.linalg.norm(rho0 - tB, axis=1)

        # revert a smooth Newton step that made things clearly worse
        bad = took_newton[idx] & (rn0 > np.maximum(1.5 * prev_rn0[idx], prev_rn0[idx] + 1e-3))
        if bad.any():
            jj = np.where(bad)[0]
            v[idx[jj]] = prev_v[idx[jj]]
            trust[idx[jj]] = np.maximum(trust[idx[jj]] * 0.25, 1e-3)
            took_newton[idx[jj]] = False
            iters[idx[jj]] += 1
            keep = np.setdiff1d(np.arange(nb), jj)
            if len(keep) == 0:
                continue
            idx = idx[keep]
            vB, tB, nb = v[idx], targets[idx], len(idx)
            w, U, scale = w[keep], U[keep], scale[keep]
            spread = spread[keep]
            g_wide, g_strict = g_wide[keep], g_strict[keep]
            psi0, rho0, rn0 = psi0[keep], rho0[keep], rn0[keep]
        took_newton[idx] = False
        trust[idx] = np.where(rn0 < prev_rn0[idx] * 0.95,
                              np.minimum(trust[idx] * 1.6, 1.0), trust[idx])
        prev_rn0[idx] = rn0
        prev_v[idx] = vB

        newv = vB.copy()
        done = np.zeros(nb, bool)
        res_now = rn0.copy()

        ok0 = (rn0 <= opts.tol) & (g_strict == 1)
        if ok0.any():
            jj = idx[ok0]
            done |= ok0
            conv[jj] = True
            g_star[jj] = 1
            resid[jj] = rn0[ok0]
            wit_g[jj] = 1

        smooth = (g_wide == 1) & ~done
        if smooth.any():
            ii = np.where(smooth)[0]
            _reset_walk(idx[ii])
            close = (rn0[ii] <= _NEWTON_RESID_MAX) & opts.newton & (trust[idx[ii]] > 2e-3)
            if close.any():
                jj = ii[close]
                dE = w[jj, 0][:, None] - w[jj, 1:]
                dE = np.where(np.abs(dE) < 1e-14, -1e-14, dE)
                T = np.einsum("lm,bl,bln->bnm", O, U[jj, :, 0], U[jj, :, 1:])
                S = -2 * np.einsum("bn,bnm,bnk->bmk", 1.0 / dE, T, T)
                smax = np.abs(S).max(axis=(1, 2))
                mu = 1e-3 * rn0[jj] + 1e-10 * smax + 1e-12
                S = S + mu[:, None, None] * np.eye(M)[None]
                dv = np.linalg.solve(S, (rho0[jj] - tB[jj])[:, :, None])[:, :, 0]
                dv -= dv.mean(axis=1, keepdims=True)
                nrm = np.linalg.norm(dv, axis=1, keepdims=True)
                dv *= np.minimum(1.0, trust[idx[jj]][:, None] / np.maximum(nrm, 1e-300))
                newv[jj] = vB[jj] + dv
                took_newton[idx[jj]] = True
            jj = ii[~close]
            astep = np.where(nopin[idx[jj]] > 0, max(alpha, 0.2), alpha)
            newv[jj] = vB[jj] + astep[:, None] * (rho0[jj] - tB[jj])

        for gval in [int(g_) for g_ in np.unique(g_wide) if g_ >= 2]:
            ii = np.where((g_wide == gval) & ~done)[0]
            if len(ii) == 0:
                continue
            jj = idx[ii]
            Phi = U[ii][:, :, :gval]
            Fd = np.einsum("lm,blk->bkm", O, Phi ** 2)
            pairs = [(k, l) for k in range(gval) for l in range(k + 1, gval)]
            if pairs:
                Fo = np.stack([2 * np.einsum("lm,bl,bl->bm", O, Phi[:, :, k], Phi[:, :, l])
                               for (k, l) in pairs], axis=1)
            else:
                Fo = np.zeros((len(ii), 0, M))
            P = np.concatenate([Fd, Fo], axis=1).transpose(0, 2, 1)
            if gval == 2:
                A, proj, rn = _project_disc_g2(Fd, Fo, tB[ii])
            else:
                A0 = A_warm[jj][:, :gval, :gval].copy()
                fresh = warm_g[jj] != gval
                if fresh.any():
                    A0[fresh] = np.eye(gval) / gval
                A, proj, rn = _project_targets(P, tB[ii], A0, 40 if it <= 2 else 10)
                sprd = spread[ii, gval - 1] / scale[ii]
                deep = (rn > opts.tol) & ((rn <= 5e-2) | (sprd <= _SPREAD_PINNED))
                if deep.any():
                    dd = np.where(deep)[0]
                    A2, proj2, rn2 = _project_targets(P[dd], tB[ii[dd]], A[dd], 120)
                    A[dd], proj[dd], rn[dd] = A2, proj2, rn2
                A_warm[jj, :gval, :gval] = A
                warm_g[jj] = gval
            res_now[ii] = np.minimum(res_now[ii], rn)

            okc = (rn <= opts.tol) & (g_strict[ii] == gval)
            if okc.any():
                sel = ii[okc]
                done[sel] = True
                conv[idx[sel]] = True
                g_star[idx[sel]] = gval
                resid[idx[sel]] = rn[okc]
                wit_A[idx[sel], :gval, :gval] = A[okc]
                wit_g[idx[sel]] = gval
            rest = np.where(~okc)[0]
            if len(rest) == 0:
                continue
            kk = ii[rest]            # local rows into idx
            rows = idx[kk]           # global sample ids
            grad = proj[rest] - tB[kk]
            spr = spread[kk, gval - 1] / scale[kk]
            near = (spr <= _SPREAD_PIN_MAX) & ((rn[rest] <= _PIN_RESID_MAX) |
                                               (spr <= _SPREAD_PINNED))
            tight = spr <= _SPREAD_PINNED
            stepv = alpha * grad                      # plain supergradient default
            _reset_walk(rows[~near])
            if near.any() and opts.newton:
                pp = np.where(near)[0]
                sel = rest[pp]
                prows = rows[pp]
                nrows = gval - 1 + len(pairs)
                J = np.zeros((len(pp), nrows + 1, M))
                bvec = np.zeros((len(pp), nrows + 1))
                for r_, k_ in enumerate(range(1, gval)):
                    J[:, r_, :] = Fd[sel, k_] - Fd[sel, 0]
                    bvec[:, r_] = -(w[kk[pp], k_] - w[kk[pp], 0])
                for r_, _pair in enumerate(pairs):
                    J[:, gval - 1 + r_, :] = Fo[sel, r_]
                J[:, -1, :] = 1.0
                Ju, Js, Jvt = np.linalg.svd(J, full_matrices=True)
                kmin = Js.shape[1]   # min(rows, M)
                smaxJ = Js[:, 0:1]
                rkeep = Js > 1e-9 * np.maximum(smaxJ, 1e-30)
                Sinv = np.where(rkeep, 1.0 / np.maximum(Js, 1e-300), 0.0)
                Jp = np.einsum("bkm,bk,brk->bmr", Jvt[:, :kmin, :], Sinv,
                               Ju[:, :, :kmin])
                dv_pin = np.einsum("bmr,br->bm", Jp, bvec)
                Tg = grad[pp] - np.einsum("bmr,brk,bk->bm", Jp, J, grad[pp])
                tdim = M - rkeep.sum(axis=1)
                # tangent direction: last right-singular vector when 1-d
                cand = Jvt[:, -1, :]
                tn = np.linalg.norm(Tg, axis=1)
                use_tg = tn > 1e-12
                dirn = np.where(use_tg[:, None], Tg / np.maximum(tn[:, None], 1e-300), cand)
                dirn /= np.maximum(np.linalg.norm(dirn, axis=1, keepdims=True), 1e-300)
                # keep orientation continuous; reset walk when direction turns
                flip = np.einsum("bm,bm->b", dirn, wdir[prows]) < 0
                dirn[flip] *= -1.0
                turned = (np.einsum("bm,bm->b", dirn, wdir[prows]) < 0.99) & have_dir[prows]
                for rsel in (prows[turned], prows[~have_dir[prows]]):
                    if len(rsel):
                        _reset_walk(rsel)
                fresh_dir = ~have_dir[prows]
                anchor[prows[fresh_dir]] = vB[kk[pp]][fresh_dir]
                wdir[prows] = dirn
                have_dir[prows] = True
                scur = np.einsum("bm,bm->b", vB[kk[pp]] - anchor[prows], dirn)
                phi = np.einsum("bm,bm->b", grad[pp], dirn)  # dual ascent derivative
                # bracket the sign change of phi along the walk
                flipped = have_phi[prows] & (phi * phiprev[prows] < 0)
                if flipped.any():
                    r2 = prows[np.where(flipped)[0]]
                    ff = np.where(flipped)[0]
                    blo[r2] = np.where(phiprev[r2] > 0, sprev[r2], scur[ff])
                    bhi[r2] = np.where(phiprev[r2] > 0, scur[ff], sprev[r2])
                    have_br[r2] = True
                inbr = have_br[prows]
                if inbr.any():
                    bb = np.where(inbr)[0]
                    r2 = prows[bb]
                    pos = phi[bb] > 0
                    blo[r2] = np.where(pos, scur[bb], blo[r2])
                    bhi[r2] = np.where(pos, bhi[r2], scur[bb])
                if (~inbr).any():
                    r2 = prows[np.where(~inbr)[0]]
                    mstep[r2] = np.minimum(mstep[r2] * 1.6, 2.0)
                adv = tight[pp]
                sprev[prows[adv]] = scur[adv]
                phiprev[prows[adv]] = phi[adv]
                have_phi[prows[adv]] = True
                starget = np.where(
                    inbr, 0.5 * (blo[prows] + bhi[prows]),
                    scur + np.sign(phi + 1e-300) * mstep[prows])
                ds = starget - scur
                free = (tdim >= 1) & tight[pp]
                stepv[pp] = dv_pin + np.where(free[:, None], ds[:, None] * dirn, 0.0)
                # bracket collapsed without membership: at a manifold crossing
                # re-derive the direction, otherwise leave this manifold
                exh = have_br[prows] & (bhi[prows] - blo[prows] < 1e-10) & (rn[sel] > opts.tol)
                runaway = ~have_br[prows] & (np.abs(scur) > 50.0)
                isol = tight[pp] & (tdim == 0) & (rn[sel] > opts.tol)
                pin0[prows[isol]] += 1
                pin0[prows[~isol]] = 0
                exh = exh | (pin0[prows] > 5)
                if exh.any() or runaway.any():
                    ee = np.where(exh | runaway)[0]
                    cross = (tdim[ee] >= 2) & (pin0[prows[ee]] <= 5)
                    _reset_walk(prows[ee])
                    esc = prows[ee[~cross]]
                    nopin[esc] = _ESCAPE_COOLDOWN
                    pin0[esc] = 0
                    # kick away from the exhausted point
                    kickrows = ee[~cross]
                    stepv[pp[kickrows]] = grad[pp[kickrows]] * 1.0
            nrm = np.linalg.norm(stepv, axis=1, keepdims=True)
            stepv *= np.minimum(1.0, 2.0 / np.maximum(nrm, 1e-300))
            newv[kk] = vB[kk] + stepv

        gain = res_now < best_res[idx] * (1 - 1e-3)
        better = res_now < best_res[idx]
        best_v[idx[better]] = vB[better]
        best_res[idx] = np.minimum(best_res[idx], res_now)
        last_gain[idx] = np.where(gain, 0, last_gain[idx] + 1)
        stall = (last_gain[idx] > _STALL_ITERS) & ~done
        if stall.any():
            jj = idx[stall]
            nopin[jj] = np.where(g_wide[stall] >= 2, _ESCAPE_COOLDOWN, 0)
            best_res[jj] = np.inf
            last_gain[jj] = 0
            trust[jj] = 0.5
            _reset_walk(jj)
        ending = nopin[idx] == 1
        if ending.any():
            ee = np.where(ending & (res_now > 2.0 * best_res[idx]))[0]
            newv[ee] = best_v[idx[ee]]
            _reset_walk(idx[ee])
        nopin[idx] = np.maximum(nopin[idx] - 1, 0)

        newv -= newv.mean(axis=1, keepdims=True)
        v[idx] = newv
        iters[idx] += 1
        act[idx[done]] = False
        if track_history and it % opts.history_stride == 0:
            history.append((it, np.linalg.norm(v, axis=1).copy()))

    return BatchResult(v=v, converged=conv, g_star=g_star, residual=resid,
                       iterations=iters, witness_A=wit_A, witness_g=wit_g,
                       v_norm_history=history)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def invert_density(spec: SystemSpec, target, opts: InversionOptions | None = None
                   ) -> InversionResult:
    """Potential whose degeneracy region contains the target density."""
    opts = opts or InversionOptions()
    t = np.asarray(getattr(target, "rho", target), dtype=float).reshape(-1)
    if t.size != spec.M:
        raise DomainError(f"target has dimension {t.size}, expected {spec.M}")
    if t.min() < -1e-10 or t.max() > 1 + 1e-10 or abs(t.sum() - spec.N) > 1e-8:
        raise DomainError("target lies outside the density domain")
    boundary = bool(t.min() <= opts.boundary_margin or
                    t.max() >= 1 - opts.boundary_margin)
    out = invert_batch(spec, t[None, :], opts, track_history=True)
    g = int(out.g_star[0])
    witness = out.witness_A[0, :g, :g] if g > 1 else None
    return InversionResult(
        v_star=Potential(out.v[0] - out.v[0].mean(), gauge="sum-zero"),
        converged=bool(out.converged[0]),
        residual=float(out.residual[0]) if np.isfinite(out.residual[0]) else math.inf,
        g_at_vstar=g,
        boundary_flag=boundary,
        iterations=int(out.iterations[0]),
        witness=witness,
        v_norm_history=tuple(float(h[1][0]) for h in out.v_norm_history),
    )


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    lower_bound_only: bool
    inversion: InversionResult


def universal_F(spec: SystemSpec, target, opts: InversionOptions | None = None
                ) -> FunctionalValue:
    """Constrained-search functional by convex duality:
    F(rho) = sup_v {E(v) - <v, rho>}, attained at the inverting potential."""
    opts = opts or InversionOptions()
    t = np.asarray(getattr(target, "rho", target), dtype=float).reshape(-1)
    inv = invert_density(spec, t, opts)
    val = energy(spec, inv.v_star) - float(inv.v_star.v @ t)
    return FunctionalValue(val, lower_bound_only=not inv.converged, inversion=inv)


@dataclass(frozen=True)
class RatioEstimate:
    system: str
    n_samples: int
    accepted: int
    degenerate: int
    ratio: float
    stderr: float
    seed: int
    thresholds: dict
    converged: int

    def to_json_dict(self) -> dict:
        return {
            "system": self.system,
            "n": self.n_samples,
            "accepted": self.accepted,
            "degenerate": self.degenerate,
            "ratio": self.ratio,
            "stderr": self.stderr,
            "seed": self.seed,
            "thresholds": self.thresholds,
        }


def sample_hypersimplex(M: int, N: int, n: int, rng) -> np.ndarray:
    """Exactly n uniform densities on the hypersimplex (Dirichlet rejection)."""
    out = []
    total = 0
    while total < n:
        batch = rng.dirichlet(np.ones(M), size=2 * (n - total) + 16) * N
        keep = batch[batch.max(axis=1) <= 1.0][: n - total]
        out.append(keep)
        total += len(keep)
    return np.concatenate(out, axis=0)


def degeneracy_ratio(spec: SystemSpec, n_samples: int, seed: int,
                     thresholds: dict | None = None, system: str = "",
                     threads: int = 1) -> RatioEstimate:
    """Monte-Carlo fraction of the density domain covered by degeneracy
    regions: sample uniformly, invert, count converged inversions whose
    ground state is degenerate at the widened verdict tolerance."""
    if n_samples < 100:
        raise DomainError("need at least 100 samples")
    th = {"deg_tol": 1e-6, "tol": 1e-7, "margin_shrink": 1e-4}
    th.update(thresholds or {})
    opts = InversionOptions(tol=th["tol"], deg_tol=th["deg_tol"])
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    raw = rng.dirichlet(np.ones(spec.M), size=n_samples) * spec.N
    acc = raw[raw.max(axis=1) <= 1.0]
    if len(acc) == 0:
        raise DomainError("rejection sampling accepted nothing; invalid (M, N)?")
    center = spec.N / spec.M
    targets = (1 - th["margin_shrink"]) * acc + th["margin_shrink"] * center

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        chunks = np.array_split(targets, threads)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            outs = list(ex.map(lambda c: invert_batch(spec, c, opts), chunks))
        conv = np.concatenate([o.converged for o in outs])
        gst = np.concatenate([o.g_star for o in outs])
    else:
        out = invert_batch(spec, targets, opts)
        conv, gst = out.converged, out.g_star
    degenerate = int(np.sum(conv & (gst >= 2)))
    accepted = len(acc)
    ratio = degenerate / accepted
    stderr = math.sqrt(max(ratio * (1 - ratio), 0.0) / accepted)
    return RatioEstimate(system=system, n_samples=n_samples, accepted=accepted,
                         degenerate=degenerate, ratio=ratio, stderr=stderr,
                         seed=seed, thresholds=th, converged=int(conv.sum()))
