#!/usr/bin/env python3
"""Build the desk-scale fixtures used by the test suite.

Two things are produced under ``tests/data``:

* ``mnist5k-{images,labels}-idx*-ubyte.gz``: the 5000-sample MNIST subset
  shipped with mlxtend (500 per digit), re-encoded as IDX.
* ``templates/<digit>/<font>.pgm``: clean 28x28 renderings of each digit in
  ten system typefaces, white strokes on black, boxed and centred the way
  MNIST digits are (20x20 box, centre of mass at the image centre).

Rasterization lives here, not in the library: the library only consumes
pre-rendered bitmaps.

Usage:
    python tools/make_fixtures.py --mnist-csv /path/to/mnist_5k.csv.gz
"""

import argparse
import gzip
import struct
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont
from scipy import ndimage

MPL_FONTS = Path("/usr/local/lib/python3.10/dist-packages/matplotlib/mpl-data/fonts/ttf")
SYS_FONTS = Path("/usr/share/fonts/truetype/dejavu")

FONTS = {
    "dejavu_sans": SYS_FONTS / "DejaVuSans.ttf",
    "dejavu_sans_bold": SYS_FONTS / "DejaVuSans-Bold.ttf",
    "dejavu_serif": SYS_FONTS / "DejaVuSerif.ttf",
    "dejavu_serif_bold": SYS_FONTS / "DejaVuSerif-Bold.ttf",
    "dejavu_mono": SYS_FONTS / "DejaVuSansMono.ttf",
    "dejavu_sans_oblique": MPL_FONTS / "DejaVuSans-Oblique.ttf",
    "cm_roman": MPL_FONTS / "cmr10.ttf",
    "cm_sans": MPL_FONTS / "cmss10.ttf",
    "cm_typewriter": MPL_FONTS / "cmtt10.ttf",
    "stix_general": MPL_FONTS / "STIXGeneral.ttf",
}


def render_digit(digit: int, font_path: Path, stroke: int = 6) -> np.ndarray:
    canvas = 160
    font = ImageFont.truetype(str(font_path), 120)
    img = Image.new("L", (canvas, canvas), 0)
    draw = ImageDraw.Draw(img)
    draw.text((canvas // 2, canvas // 2), str(digit), fill=255, font=font, anchor="mm")
    # thicken toward MNIST pen width before downsampling
    img = img.filter(ImageFilter.MaxFilter(stroke + 1))
    arr = np.asarray(img)
    rows = np.flatnonzero(arr.max(axis=1))
    cols = np.flatnonzero(arr.max(axis=0))
    crop = Image.fromarray(arr[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1])
    h, w = crop.height, crop.width
    scale = 20.0 / max(h, w)
    nh, nw = max(1, round(h * scale)), max(1, round(w * scale))
    small = np.asarray(crop.resize((nw, nh), Image.LANCZOS), dtype=np.float64)
    out = np.zeros((28, 28))
    top, left = (28 - nh) // 2, (28 - nw) // 2
    out[top:top + nh, left:left + nw] = small
    cy, cx = ndimage.center_of_mass(out)
    out = ndimage.shift(out, (13.5 - cy, 13.5 - cx), order=1, mode="constant")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def write_pgm(path: Path, pixels: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = pixels.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes())


def write_idx(images: np.ndarray, labels: np.ndarray, out_dir: Path, stem: str) -> None:
    n = len(images)
    with gzip.GzipFile(out_dir / f"{stem}-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 2051, n, 28, 28))
        f.write(images.astype(np.uint8).tobytes())
    with gzip.GzipFile(out_dir / f"{stem}-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 2049, n))
        f.write(labels.astype(np.uint8).tobytes())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mnist-csv", type=Path, help="mlxtend mnist_5k.csv.gz")
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "tests" / "data")
    args = ap.parse_args()

    if args.mnist_csv is not None:
        table = np.genfromtxt(args.mnist_csv, delimiter=",")
        write_idx(table[:, :-1], table[:, -1], args.out, "mnist5k")

    for name, path in FONTS.items():
        for digit in range(10):
            write_pgm(args.out / "templates" / str(digit) / f"{name}.pgm", render_digit(digit, path))


if __name__ == "__main__":
    main()
