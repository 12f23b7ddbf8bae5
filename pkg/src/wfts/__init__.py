"""
wfts: Wasserstein-Fourier analysis of stationary time series.

Series are embedded as normalised power spectral densities (NPSDs) and
compared with the 1-D quadratic Wasserstein distance.  The modules:

``spectral``     periodograms, NPSDs, ACF <-> NPSD, resynthesis
``transport``    quantile functions, W_p, geodesics, barycenters, log/exp maps
``interpolate``  signal and covariance-kernel geodesics, augmentation
``pga``          principal geodesic analysis in the tangent space
``classify``     distance-feature logistic models, KNN, cross-validation
``synthetic``    seeded toy datasets
``io``, ``cli``  dataset files, experiment runner, command line
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spectral import (Acf, FrequencyGrid, Npsd, Psd, Spectrum, TimeSeries,
                       acf_from_npsd, empirical_acf, fourier, normalize, npsd,
                       npsd_from_acf, periodogram, reconstruct)
from .transport import (geodesic, log_map, exp_map, quantile_function,
                        wasserstein, wasserstein_matrix, wf_barycenter,
                        wf_distance)
from .interpolate import augment, kernel_geodesic, signal_geodesic
from .pga import fit_pga
from .classify import cross_validate, fit_knn, fit_logistic, predict, predict_proba
from .synthetic import Dataset, generate_synthetic
from .io import load_ucr, save_ucr
