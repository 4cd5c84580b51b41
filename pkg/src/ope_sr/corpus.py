"""Small bundled image corpus for desk-scale experiments.

Seven 144x144 crops of public-domain scikit-image photographs plus two
procedural textures.  Everything is deterministic.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .imageio import load_image

SIZE = 144
PHOTOS = ("astronaut", "camera", "chelsea", "coffee", "hubble_deep_field", "immunohistochemistry", "rocket")
IMAGE_SUFFIXES = (".png", ".ppm")


def _rgb(img: np.ndarray) -> np.ndarray:
    return np.repeat(img, 3, axis=2) if img.shape[2] == 1 else img[..., :3]


def photo(name: str) -> np.ndarray:
    path = resources.files("ope_sr") / "data" / f"{name}.png"
    with resources.as_file(path) as p:
        return _rgb(load_image(p))


def power_law_texture(size: int = SIZE, beta: float = 2.0, seed: int = 0) -> np.ndarray:
    """Random RGB field with a 1/f^beta power spectrum, rescaled to [0, 1].

    beta = 2 matches the second-order statistics of natural images.
    """
    rng = np.random.default_rng(seed)
    f = np.fft.fftfreq(size)
    k = np.hypot(*np.meshgrid(f, f, indexing="ij"))
    k[0, 0] = 1.0
    amp = k ** (-beta / 2.0)
    amp[0, 0] = 0.0
    chans = []
    for _ in range(3):
        spectrum = amp * (rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size)))
        x = np.fft.ifft2(spectrum).real
        chans.append((x - x.min()) / (x.max() - x.min()))
    return np.stack(chans, axis=-1)


def shapes_texture(size: int = SIZE, seed: int = 0) -> np.ndarray:
    """Shaded discs and rectangles with hard edges over a smooth gradient."""
    rng = np.random.default_rng(seed)
    t = (np.arange(size) + 0.5) / size
    yy, xx = np.meshgrid(t, t, indexing="ij")
    img = np.stack([0.3 + 0.4 * xx, 0.3 + 0.4 * yy, 0.5 + 0.2 * xx * yy], axis=-1)
    for _ in range(12):
        color = rng.uniform(0.05, 0.95, size=3)
        shade = 0.8 + 0.2 * np.cos(2 * np.pi * rng.uniform(0.5, 2.0) * (xx + yy))
        if rng.random() < 0.5:
            cy, cx, rad = rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.05, 0.2)
            mask = (yy - cy) ** 2 + (xx - cx) ** 2 < rad**2
        else:
            y0, x0 = rng.uniform(0, 0.8, size=2)
            y1, x1 = y0 + rng.uniform(0.05, 0.3), x0 + rng.uniform(0.05, 0.3)
            mask = (yy > y0) & (yy < y1) & (xx > x0) & (xx < x1)
        img[mask] = (color * shade[..., None])[mask]
    return np.clip(img, 0.0, 1.0)


def load_corpus(include_textures: bool = True) -> list[tuple[str, np.ndarray]]:
    """(name, image) pairs: the bundled photographs, then the textures."""
    items = [(name, photo(name)) for name in PHOTOS]
    if include_textures:
        items.append(("texture_power_law", power_law_texture()))
        items.append(("texture_shapes", shapes_texture()))
    return items


def load_directory(path, limit: int | None = None) -> list[tuple[str, np.ndarray]]:
    """Load every PNG/PPM image in ``path`` in sorted filename order."""
    files = sorted(p for p in Path(path).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no .png or .ppm images in {path}")
    if limit is not None:
        files = files[:limit]
    return [(p.stem, _rgb(load_image(p))) for p in files]


def crop_to_multiple(img: np.ndarray, r: int) -> np.ndarray:
    """Trim bottom/right edges so both sides are divisible by ``r``."""
    H, W = img.shape[:2]
    return img[: H - H % r, : W - W % r]
