"""Regenerate the bundled test corpus from scikit-image sample data.

Center crops of 144x144 (divisible by every r in 1..4, 6, 8, 9, 12) of
public-domain photographs shipped with scikit-image.
"""

from pathlib import Path

import numpy as np
import skimage.data
from PIL import Image

SIZE = 144
NAMES = ["astronaut", "camera", "chelsea", "coffee", "hubble_deep_field", "immunohistochemistry", "rocket"]
OUT = Path(__file__).resolve().parent.parent / "src" / "ope_sr" / "data"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name in NAMES:
        img = getattr(skimage.data, name)()
        if img.ndim == 3:
            img = img[..., :3]
        h, w = img.shape[:2]
        top, left = h // 2 - SIZE // 2, w // 2 - SIZE // 2
        crop = np.ascontiguousarray(img[top : top + SIZE, left : left + SIZE])
        Image.fromarray(crop).save(OUT / f"{name}.png")
        print(f"wrote {name}.png {crop.shape}")


if __name__ == "__main__":
    main()
