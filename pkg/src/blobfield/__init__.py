"""Differentiable 3D blob-scene renderer.

Ellipsoid blobs with logistic Mahalanobis density fields are volume
rendered into per-blob opacity maps, depth sorted, and composited into
feature/style grids with true perspective foreshortening; analytic
gradients make the whole pipeline fittable by gradient descent.
"""

from ._accel import USING_NUMBA, backend_name, set_threads
from .camera import (
    Camera,
    Ray,
    camera_basis,
    camera_position,
    centroid_depth,
    make_camera,
    project,
    ray_for_pixel,
)
from .composite import (
    DepthOrder,
    composite_features,
    composite_weights,
    default_palette,
    depth_sort,
    layout_image,
    style_grids,
)
from .edits import apply_edit, move_past
from .errors import BlobfieldError
from .fit import FitConfig, FitReport, fit_scene
from .geometry import density, mahalanobis_sq, rotation_from_euler
from .gradients import (
    BlobParamGrad,
    depth_loss,
    fd_check,
    grad_composite,
    grad_depth_loss,
    grad_opacity_map,
)
from .pipeline import (
    hierarchical_style_grids,
    render_bytes,
    render_feature_grid,
    render_layout,
    render_weight_stack,
)
from .render import (
    SamplingConfig,
    default_sampling,
    feature_map,
    opacity_along_ray,
    opacity_map,
    opacity_pyramid,
    sample_ray,
)
from .scene import (
    Blob,
    EditOp,
    SceneLayout,
    load_scene,
    sample_scene,
    save_scene,
)
from .upsampler import (
    UpsamplerParams,
    bilinear_2x,
    mod_conv_1x1,
    pixel_shuffle_2x,
    upsample_block,
)

__version__ = "0.1.0"
