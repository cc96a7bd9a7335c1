"""Derivative-free simplex minimization, batched over independent problems.

One Nelder–Mead instance per row, all advanced in lockstep with masked
updates.  Rows that converge (value spread at or below ``fatol``) or hit the
evaluation cap freeze while the rest continue, so a large batch costs a
handful of vectorized array operations per iteration instead of a Python
loop per problem.

Standard simplex coefficients: reflection 1, expansion 2, contraction 0.5,
shrink 0.5.
"""

from __future__ import annotations

import numpy as np


def nelder_mead_batch(fn, x0, *, step: float = 0.25, fatol: float = 1e-10, max_evals: int = 2000):
    """Minimize ``k`` independent instances of an ``n``-dimensional objective.

    ``fn(points, rows)`` must map an (m, n) stack of points plus the (m,)
    array of instance indices they belong to into (m,) values, with rows
    evaluated independently.  ``x0`` is (k, n).  Each instance starts from
    the axis-aligned simplex ``x0[i]``, ``x0[i] + step * e_j`` and stops when
    its value spread is at most ``fatol`` or its evaluation count reaches
    ``max_evals``.

    Returns ``(x_best, f_best, evals, converged)`` with shapes (k, n), (k,),
    (k,), (k,).
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    k, n = x0.shape
    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    for j in range(n):
        simplex[:, j + 1, j] += step
    rows0 = np.repeat(np.arange(k), n + 1)
    fvals = np.asarray(fn(simplex.reshape(k * (n + 1), n), rows0), dtype=float).reshape(k, n + 1)
    evals = np.full(k, n + 1)
    alive = np.ones(k, dtype=bool)

    while True:
        order = np.argsort(fvals, axis=1, kind="stable")
        fvals = np.take_along_axis(fvals, order, axis=1)
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        spread = fvals[:, -1] - fvals[:, 0]
        alive &= (spread > fatol) & (evals < max_evals)
        act = np.nonzero(alive)[0]
        if act.size == 0:
            break

        centroid = simplex[act, :n, :].mean(axis=1)
        worst = simplex[act, n, :]
        xr = 2.0 * centroid - worst
        fr = np.asarray(fn(xr, act), dtype=float)
        evals[act] += 1

        f_best = fvals[act, 0]
        f_second = fvals[act, n - 1]
        f_worst = fvals[act, n]
        m_exp = fr < f_best
        m_ref = ~m_exp & (fr < f_second)
        m_con = ~m_exp & ~m_ref
        m_oc = m_con & (fr < f_worst)
        m_ic = m_con & ~m_oc

        new_x = xr.copy()
        new_f = fr.copy()
        shrink = np.zeros(act.size, dtype=bool)

        if m_exp.any():
            sub = np.nonzero(m_exp)[0]
            xe = 3.0 * centroid[sub] - 2.0 * worst[sub]
            fe = np.asarray(fn(xe, act[sub]), dtype=float)
            evals[act[sub]] += 1
            take = fe < fr[sub]
            new_x[sub[take]] = xe[take]
            new_f[sub[take]] = fe[take]

        if m_con.any():
            sub = np.nonzero(m_con)[0]
            # outside contraction toward the reflection, inside away from it
            sgn = np.where(m_oc[sub], 0.5, -0.5)
            xc = centroid[sub] + sgn[:, None] * (centroid[sub] - worst[sub])
            fc = np.asarray(fn(xc, act[sub]), dtype=float)
            evals[act[sub]] += 1
            ok = np.where(m_oc[sub], fc <= fr[sub], fc < f_worst[sub])
            new_x[sub[ok]] = xc[ok]
            new_f[sub[ok]] = fc[ok]
            shrink[sub[~ok]] = True

        keep = ~shrink
        simplex[act[keep], n, :] = new_x[keep]
        fvals[act[keep], n] = new_f[keep]

        if shrink.any():
            rows = act[shrink]
            best = simplex[rows, 0, :][:, None, :]
            shrunk = best + 0.5 * (simplex[rows, 1:, :] - best)
            simplex[rows, 1:, :] = shrunk
            fvals[rows, 1:] = np.asarray(
                fn(shrunk.reshape(-1, n), np.repeat(rows, n)), dtype=float
            ).reshape(-1, n)
            evals[rows] += n

    converged = (fvals[:, -1] - fvals[:, 0]) <= fatol
    return simplex[:, 0, :], fvals[:, 0], evals, converged
