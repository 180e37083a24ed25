#!/usr/bin/env python
# coding: utf-8

# # Which teeth survive?
#
# A sawtooth with six teeth of height 0.3.  The samples sit exactly on the
# outline, but each carries a noise radius that grows from 0 on the left
# to 0.6 on the right.  Teeth taller than their radius should keep their
# shape, and teeth buried in the noise should be flattened.

# In[ ]:
from pathlib import Path

import numpy as np

from curvedenoise import ShapeSpec, denoise, generate
from curvedenoise.geom import turning_angles
from curvedenoise.svg import write_svg

spec = ShapeSpec("sawtooth", 30, 0.0, seed=0, size=6.0, teeth=6, amplitude=0.3,
                 profile="ramp", delta_end=0.6, perturb=False)
curve, noisy, model = generate(spec)
result = denoise(model)


# ## Turning at every apex
#
# We add up the turning angle at each apex and its two neighbours.

# In[ ]:
before = np.degrees(turning_angles(model.vertices))
after = np.degrees(turning_angles(result.vertices))
m = len(model)
apexes = np.flatnonzero(np.isclose(model.vertices[:, 1], 6.0 / 4 + 0.3))
for k in sorted(apexes, key=lambda i: model.vertices[i, 0]):
    ids = [(k - 1) % m, k, (k + 1) % m]
    print("apex at x=%.1f  radius %.2f  turning %6.1f -> %6.1f" % (
        model.vertices[k, 0], model.noise_radii[k], before[ids].sum(), after[ids].sum()))


# ## A picture
#
# Grey discs are the noise radii, blue is the input and red the output.

# In[ ]:
out = Path(__file__).with_name("sawtooth_features.svg")
write_svg(out, noisy, [model.vertices, result.vertices], (model.vertices, model.noise_radii))
print("wrote", out)
