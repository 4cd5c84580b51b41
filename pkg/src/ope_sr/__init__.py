"""Orthogonal position encoding (OPE) image representation and upsampling."""

from .basis import BasisIndex, OpeConfig, basis_eval, gamma, gram_matrix, inner_product, ope
from .featuremap import FeatureMap, flip, flip_spatial, random_feature_map, read_opef, write_opef
from .geometry import EnsembleNeighborhood, GridSpec, cell_center, neighborhood
from .imageio import bicubic_resize, flip_image, load_image, psnr, save_image
from .projector import encode_image, encode_pixels, project_window
from .renderer import EnsembleMode, op_count, render_image, render_pixel, render_single
from .report import RunReport

__all__ = [
    "BasisIndex", "OpeConfig", "basis_eval", "gamma", "gram_matrix", "inner_product", "ope",
    "FeatureMap", "flip", "flip_spatial", "random_feature_map", "read_opef", "write_opef",
    "EnsembleNeighborhood", "GridSpec", "cell_center", "neighborhood",
    "bicubic_resize", "flip_image", "load_image", "psnr", "save_image",
    "encode_image", "encode_pixels", "project_window",
    "EnsembleMode", "op_count", "render_image", "render_pixel", "render_single",
    "RunReport",
]
