#!/usr/bin/env python
# coding: utf-8

# # Inside one local problem
#
# The denoiser cuts the polygon into runs of vertices whose noise discs can
# all be crossed by one straight line.  Each run becomes a small bounded
# least-squares problem with one balance equation.  This notebook looks at
# those pieces one at a time.

# In[ ]:
import numpy as np

from curvedenoise import ShapeSpec, denoise, generate
from curvedenoise.solver import LinearSystem, solve_bounded
from curvedenoise.stab import line_stabs_discs


# ## Line transversals
#
# Three discs of radius 1.  The middle one is lifted until no line can
# cross all three.  At a lift of exactly 2 the line y = 1 just touches it,
# which still counts.

# In[ ]:
for lift in (1.0, 1.9, 2.0, 2.1):
    centers = np.array([[0.0, 0.0], [2.0, lift], [4.0, 0.0]])
    print("lift %.1f  stabbed: %s" % (lift, line_stabs_discs((centers, np.ones(3)))))


# ## The bounded solver
#
# Minimize |H x - y|^2 with sum(x) = 0 and |x_i| <= 0.5.  The unbounded
# answer wants x = (2, -1, -1), so the first variable is pinned.

# In[ ]:
system = LinearSystem(np.eye(3), [3.0, 0.0, 0.0], [[1.0, 1.0, 1.0]], [0.0],
                      -0.5 * np.ones(3), 0.5 * np.ones(3))
sol = solve_bounded(system)
print("x =", sol.x, " pinned:", sol.clamped, " equality residual:", sol.equality_residual)


# ## Watching the runs
#
# `inspect` sees every local problem as it is solved.

# In[ ]:
_, _, model = generate(ShapeSpec("square", 40, 0.15, seed=1, size=2.0))
sizes = []
res = denoise(model, inspect=lambda prob, sol: sizes.append((len(prob.vertices), len(sol.clamped))))
for n, pinned in sizes:
    print("run of %2d vertices, %d pinned" % (n, pinned))
print(res.report()["subsets"], "runs applied")
