"""
Principal geodesic analysis of cosines versus sincs.

A cosine has a two-line spectrum, a sinc a flat band.  In the tangent
space at the WF barycenter the first principal direction already splits
the two families.
"""

import warnings

import numpy as np

from wfts import npsd
from wfts.pga import component_curve, explained_variance, fit_pga
from wfts.synthetic import cos_sinc

ds = cos_sinc(25, 0.05, seed=0)
S = [npsd(s) for s in ds.series]
model = fit_pga(S, 3)
print("explained variance:", np.round(explained_variance(model), 3))

labels = np.array(ds.labels)
sc = model.scores[:, 0]
for lab in ("cos", "sinc"):
    v = sc[labels == lab]
    print(f"{lab:5s} first-component scores in [{v.min():+.3f}, {v.max():+.3f}]")

# walking along the first component changes spectral spread; a full
# standard deviation out, id + t v stops being monotone and exp_map says so
sd = np.sqrt(model.eigenvalues[0])
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    curve = component_curve(model, 0, np.array([-1.0, -0.5, 0.0, 0.5, 1.0]) * sd)
for t, s in zip((-1.0, -0.5, 0.0, 0.5, 1.0), curve):
    print(f"t = {t:+.1f} sd: NPSD std {np.sqrt(s.variance()):.3f} Hz")
for w in caught:
    print("diagnostic:", w.message)
