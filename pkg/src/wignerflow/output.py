"""Deterministic artifact writers: CSV fields, JSON reports, binary PPM rasters.

All writers are byte-stable: fixed row order (row-major, x outer), 17
significant digits for CSV, shortest round-trip repr for JSON floats, and a
fixed diverging colormap for rasters.
"""

import json

import numpy as np


def _fmt(v):
    return format(float(v), ".17g")


def write_scalar_csv(path, fld):
    grid = fld.grid
    x, p = grid.x, grid.p
    with open(path, "w", newline="\n") as fh:
        fh.write("x,p,value\n")
        for i in range(grid.n_x):
            xi = _fmt(x[i])
            row = fld.values[i]
            for j in range(grid.n_p):
                fh.write(f"{xi},{_fmt(p[j])},{_fmt(row[j])}\n")


def write_vector_csv(path, vec):
    grid = vec.grid
    x, p = grid.x, grid.p
    with open(path, "w", newline="\n") as fh:
        fh.write("x,p,Jx,Jp\n")
        for i in range(grid.n_x):
            xi = _fmt(x[i])
            for j in range(grid.n_p):
                fh.write(
                    f"{xi},{_fmt(p[j])},{_fmt(vec.j_x[i, j])},{_fmt(vec.j_p[i, j])}\n"
                )


def read_scalar_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data


def write_json(path, payload):
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def topology_payload(stagnation=None, contour_sets=None, pinch=None):
    payload = {"stagnation_points": [], "contours": [], "pinch_pairs": []}
    for s in stagnation or []:
        payload["stagnation_points"].append({
            "x": s.x, "p": s.p, "index": s.index,
            "residual": s.residual, "degenerate": s.degenerate,
        })
    for cs in contour_sets or []:
        for c in cs.contours:
            payload["contours"].append({
                "tag": cs.tag, "closed": c.closed,
                "vertices": [[float(a), float(b)] for a, b in c.vertices],
            })
    if pinch is not None:
        for (px, pp), (sx, sp), d in pinch.pairs:
            payload["pinch_pairs"].append({
                "pinch": [px, pp], "stagnation": [sx, sp], "distance": d,
            })
        payload["unmatched_pinch"] = [[a, b] for a, b in pinch.unmatched_pinch]
        payload["unmatched_stagnation"] = [
            [a, b] for a, b in pinch.unmatched_stagnation
        ]
    return payload


# ---------------------------------------------------------------------------
# rasters
# ---------------------------------------------------------------------------

def diverging_rgb(t):
    """Fixed colormap: -1 -> blue, 0 -> white, +1 -> red, linear in between."""
    t = np.clip(t, -1.0, 1.0)
    lo = np.clip(1.0 + t, 0.0, 1.0)  # fades towards blue for t < 0
    hi = np.clip(1.0 - t, 0.0, 1.0)  # fades towards red for t > 0
    r = np.where(t >= 0.0, 1.0, lo)
    g = np.where(t >= 0.0, hi, lo)
    b = np.where(t >= 0.0, hi, 1.0)
    return np.stack([r, g, b], axis=-1)


def field_to_pixels(fld, symmetric_limit=None, mask=None):
    """Scalar field -> (n_p, n_x, 3) uint8 image, p increasing upwards."""
    v = fld.values
    if symmetric_limit is None:
        symmetric_limit = float(np.abs(v).max()) or 1.0
    t = v / symmetric_limit
    rgb = diverging_rgb(t)
    if mask is not None:
        rgb[~mask] = 0.5  # masked points in neutral gray
    img = np.round(255.0 * rgb).astype(np.uint8)
    return img.transpose(1, 0, 2)[::-1]


def write_ppm(path, img):
    h, w, _ = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(img).tobytes())


def draw_polyline(img, grid, vertices, color=(0, 0, 0)):
    """Rasterize a polyline over an image with a 1-pixel pen."""
    h, w, _ = img.shape
    col = np.array(color, dtype=np.uint8)

    def to_pixel(x, p):
        cx = (x - grid.x_min) / (grid.x_max - grid.x_min) * (w - 1)
        rp = (grid.p_max - p) / (grid.p_max - grid.p_min) * (h - 1)
        return cx, rp

    v = np.asarray(vertices)
    for k in range(len(v) - 1):
        x0, y0 = to_pixel(*v[k])
        x1, y1 = to_pixel(*v[k + 1])
        n = max(2, int(np.hypot(x1 - x0, y1 - y0) * 2.0) + 1)
        xs = np.round(np.linspace(x0, x1, n)).astype(int)
        ys = np.round(np.linspace(y0, y1, n)).astype(int)
        keep = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        img[ys[keep], xs[keep]] = col
    return img
