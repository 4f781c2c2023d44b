"""2D computed tomography toolkit.

Analytic ellipse phantoms with exact sinograms, filtered back
projection in parallel and fan beam geometry, algebraic reconstruction
(Kaczmarz/ART, Tikhonov least squares), Fourier reconstruction routes,
and a CLI that renders figures next to its data outputs.
"""

from .filters import FilterSpec, filter_value, kernel_samples, kernel_value, window_value
from .geometry import (
    FanGeometry,
    LineParam,
    ParallelGeometry,
    canonicalize,
    fan_to_parallel,
    line_point,
    make_parallel_geometry,
    project_point,
)
from .phantom import (
    Ellipse,
    Phantom,
    analytic_fan_sinogram,
    analytic_sinogram,
    builtin_phantom,
    eval_phantom,
    load_phantom,
    radon_ellipse,
    radon_phantom,
    rasterize,
)
from .projector import (
    FanSinogram,
    Image,
    Sinogram,
    back_project,
    back_project_at,
    forward_project,
    ray_pixel_intersections,
)
from .fbp import convolve_rows, fbp_fan, fbp_parallel, interpolate
from .algebraic import (
    SolveReport,
    SparseMatrix,
    build_radon_matrix,
    kaczmarz,
    kaczmarz_nonneg,
    least_squares_qr,
    project_row,
    tikhonov_cg,
)
from .spectral import (
    direct_fourier_reconstruct,
    dft_1d,
    fourier_slice_residual,
    idft_1d,
    laminogram_reconstruct,
    shannon_interpolate,
)
from .noise import PortableRng, add_noise
from .metrics import error_metrics

__version__ = "0.1.0"
