"""Randomized search for a two-constraint quadratic system in R^2 on which the
primal statement holds with margin but no Lagrange multiplier exists.

Quadratics are x^T Q x + a^T x + c with small integer data. Acceptance:
  * max(f, g1, g2) >= DELTA on the box (grid + local refinement) and coercive;
  * for every lambda in [0,10]^2 (step 0.01), lambda_min of the homogenized
    f + l1 g1 + l2 g2 is below -MARGIN;
  * some grid point satisfies both constraints strictly;
  * the obstruction is visible on box samples: for every lambda on a grid,
    min over box samples of f + lambda.g is negative.
Prints the instance JSON.
"""
import json
import sys

import numpy as np
from scipy.optimize import minimize

DELTA = 0.05
MARGIN = 1e-3
rng = np.random.default_rng(int(sys.argv[1]) if len(sys.argv) > 1 else 7)


def rand_quad():
    q = rng.integers(-3, 4, size=(2, 2))
    q = np.triu(q) + np.triu(q, 1).T
    return q.astype(float), rng.integers(-3, 4, size=2).astype(float), float(rng.integers(-3, 4))


def hom(q, a, c):
    m = np.zeros((3, 3))
    m[:2, :2] = q
    m[:2, 2] = a / 2
    m[2, :2] = a / 2
    m[2, 2] = c
    return m


def evalq(quad, pts):
    q, a, c = quad
    return np.einsum("ni,ij,nj->n", pts, q, pts) + pts @ a + c


def psi_max(quads, step):
    base, m1, m2 = (hom(*t) for t in quads)
    ls = np.arange(0.0, 10.0 + 1e-12, step)
    l1, l2 = np.meshgrid(ls, ls, indexing="ij")
    mats = base + l1[..., None, None] * m1 + l2[..., None, None] * m2
    return np.linalg.eigvalsh(mats)[..., 0].max()


g = np.linspace(-5, 5, 201)
grid = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
gs = np.linspace(-5, 5, 81)
coarse = np.stack(np.meshgrid(gs, gs), -1).reshape(-1, 2)
dirs = np.stack([np.cos(np.linspace(0, np.pi, 720)), np.sin(np.linspace(0, np.pi, 720))], -1)


def phi(quads, pts):
    return np.max([evalq(t, pts) for t in quads], axis=0)


for trial in range(2_000_000):
    quads = [rand_quad() for _ in range(3)]
    if all(np.linalg.eigvalsh(t[0])[0] >= 0 for t in quads):
        continue
    # coercive: some quadratic part positive in every direction
    if np.max([np.einsum("ni,ij,nj->n", dirs, t[0], dirs) for t in quads], axis=0).min() <= 0.05:
        continue
    if psi_max(quads, 0.25) > -0.05:
        continue
    vals = phi(quads, grid)
    if vals.min() < 4 * DELTA:
        continue
    # Slater point: both constraints strictly negative somewhere
    if np.maximum(evalq(quads[1], grid), evalq(quads[2], grid)).min() > -0.1:
        continue
    best = min(
        minimize(lambda x: phi(quads, x[None, :])[0], grid[i], method="Nelder-Mead",
                 options={"xatol": 1e-10, "fatol": 1e-12}).fun
        for i in np.argsort(vals)[:10]
    )
    if best < DELTA:
        continue
    # visible on box samples: every lambda leaves a negative sample
    f, g1, g2 = (evalq(t, coarse) for t in quads)
    ls = np.arange(0.0, 30.0 + 1e-12, 0.1)
    worst = max((f + l1 * g1 + l2 * g2).min() for l1 in ls for l2 in ls)
    if worst > -0.05:
        continue
    dense = psi_max(quads, 0.01)
    if dense > -MARGIN:
        continue
    print(f"trial {trial}: min phi {best:.4f}, max psi on dense grid {dense:.4f}, "
          f"best sampled Lagrangian minimum {worst:.4f}", file=sys.stderr)

    def qjson(t):
        q, a, c = t
        return {"Q": [[str(int(v)) for v in row] for row in q],
                "a": [str(int(v)) for v in a], "c": str(int(c))}

    inst = {"dim_x": 2, "dim_y": 2, "scenarios": [{
        "kind": "constraint_perturbation",
        "f": qjson(quads[0]), "g": [qjson(quads[1]), qjson(quads[2])]}]}
    print(json.dumps(inst, indent=2))
    break
