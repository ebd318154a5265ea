"""Phase-space structure: contours, stagnation points, winding, streamlines.

Sub-cell work in this module is consistently bilinear: marching squares,
zero refinement and loop evaluation all assume the same interpolation model,
so extracted curves and points agree with each other to stitching tolerance.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LinearRing

from .errors import (
    LoopThroughStagnationError,
    ValidationError,
    WindingNotConvergedError,
)
from .grids import require_same_grid

_MAX_LOOP_SAMPLES = 2 ** 20
_REFINE_LEVELS = 52
_REFINE_BOX_CAP = 64
_RING_SAMPLES = 16
_DEGENERACY_ANGLE = 0.08
_DEGENERACY_RING_SAMPLES = 720
_NOISE_FLOOR = 1e-8


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------

@dataclass
class Contour:
    vertices: np.ndarray  # (m, 2) of (x, p)
    closed: bool


@dataclass
class ContourSet:
    contours: list
    tag: str = ""

    def __len__(self):
        return len(self.contours)

    def all_segments(self):
        """Stacked (n, 4) array of segment endpoints (x0, p0, x1, p1)."""
        segs = []
        for c in self.contours:
            v = c.vertices
            pts = np.vstack([v, v[:1]]) if c.closed else v
            segs.append(np.hstack([pts[:-1], pts[1:]]))
        if not segs:
            return np.zeros((0, 4))
        return np.vstack(segs)


def _edge_vertex(key, grid, values):
    kind, i, j = key
    x, p = grid.x, grid.p
    if kind == "x":
        va, vb = values[i, j], values[i + 1, j]
        t = min(max(va / (va - vb), 0.0), 1.0)
        return (x[i] + t * (x[i + 1] - x[i]), p[j])
    va, vb = values[i, j], values[i, j + 1]
    t = min(max(va / (va - vb), 0.0), 1.0)
    return (x[i], p[j] + t * (p[j + 1] - p[j]))


def zero_contours(fld, tag=None):
    """Marching-squares zero level set with linear edge interpolation.

    Saddle cells are disambiguated by the sign of the cell-center average.
    Stitching walks cells in ascending index order, so output ordering is
    deterministic.
    """
    v = fld.values
    grid = fld.grid
    pos = v > 0.0
    links = {}

    def connect(ka, kb):
        links.setdefault(ka, []).append(kb)
        links.setdefault(kb, []).append(ka)

    for i in range(grid.n_x - 1):
        for j in range(grid.n_p - 1):
            s0, s1, s2, s3 = pos[i, j], pos[i + 1, j], pos[i + 1, j + 1], pos[i, j + 1]
            if s0 == s1 == s2 == s3:
                continue
            bottom = ("x", i, j)
            top = ("x", i, j + 1)
            left = ("p", i, j)
            right = ("p", i + 1, j)
            crossings = []
            if s0 != s1:
                crossings.append(bottom)
            if s1 != s2:
                crossings.append(right)
            if s3 != s2:
                crossings.append(top)
            if s0 != s3:
                crossings.append(left)
            if len(crossings) == 2:
                connect(crossings[0], crossings[1])
            else:
                # ambiguous saddle: corners alternate; pair by center sign
                center_pos = (v[i, j] + v[i + 1, j] + v[i + 1, j + 1] + v[i, j + 1]) > 0.0
                if center_pos == bool(s0):
                    connect(bottom, right)
                    connect(top, left)
                else:
                    connect(bottom, left)
                    connect(top, right)

    visited = set()
    polylines = []

    def walk(start, first):
        chain = [start, first]
        visited.add(start)
        visited.add(first)
        while True:
            nxt = [k for k in links[chain[-1]] if k not in visited]
            if not nxt:
                closed = chain[0] in links[chain[-1]] and len(chain) > 2
                return chain, closed
            nxt.sort()
            visited.add(nxt[0])
            chain.append(nxt[0])

    for key in sorted(links):
        if key in visited or len(links[key]) != 1:
            continue
        chain, closed = walk(key, links[key][0])
        polylines.append((chain, closed))
    for key in sorted(links):
        if key in visited:
            continue
        chain, closed = walk(key, sorted(links[key])[0])
        polylines.append((chain, True))

    contours = []
    for chain, closed in polylines:
        pts = np.array([_edge_vertex(k, grid, v) for k in chain])
        contours.append(Contour(vertices=pts, closed=closed))
    return ContourSet(contours, tag=tag if tag is not None else fld.quantity)


# ---------------------------------------------------------------------------
# bilinear evaluation
# ---------------------------------------------------------------------------

class BilinearField:
    """Continuous (J_x, J_p) evaluator over a sampled vector field."""

    def __init__(self, vec):
        self.grid = vec.grid
        self.j_x = vec.j_x
        self.j_p = vec.j_p
        self.max_mag = float(vec.magnitude().max())

    def _locate(self, x, p):
        g = self.grid
        fx = (x - g.x_min) / g.dx
        fp = (p - g.p_min) / g.dp
        i = int(min(max(math.floor(fx), 0), g.n_x - 2))
        j = int(min(max(math.floor(fp), 0), g.n_p - 2))
        return i, j, fx - i, fp - j

    def __call__(self, x, p):
        i, j, s, t = self._locate(x, p)
        out = []
        for comp in (self.j_x, self.j_p):
            out.append(
                comp[i, j] * (1 - s) * (1 - t)
                + comp[i + 1, j] * s * (1 - t)
                + comp[i, j + 1] * (1 - s) * t
                + comp[i + 1, j + 1] * s * t
            )
        return np.array(out)

    def in_bounds(self, x, p):
        g = self.grid
        return g.x_min <= x <= g.x_max and g.p_min <= p <= g.p_max


def _as_evaluator(j):
    return j if callable(j) else BilinearField(j)


# ---------------------------------------------------------------------------
# stagnation points
# ---------------------------------------------------------------------------

@dataclass
class StagnationPoint:
    x: float
    p: float
    index: int
    residual: float
    degenerate: bool = False


def _bilinear(c00, c10, c01, c11, s, t):
    return (
        c00 * (1 - s) * (1 - t) + c10 * s * (1 - t) + c01 * (1 - s) * t + c11 * s * t
    )


def _refine_cell(jx, jp, i, j):
    """Subdivide the unit cell until boxes isolating joint zeros are tiny.

    Bilinear functions attain their extrema over any axis-aligned rectangle
    at its corners, so corner sign spans decide exactly whether a component
    can vanish inside a box.
    """
    cx = (jx[i, j], jx[i + 1, j], jx[i, j + 1], jx[i + 1, j + 1])
    cp = (jp[i, j], jp[i + 1, j], jp[i, j + 1], jp[i + 1, j + 1])

    def comp(vals, s, t):
        return _bilinear(vals[0], vals[1], vals[2], vals[3], s, t)

    def spans_zero(vals, s0, s1, t0, t1):
        corners = [comp(vals, s, t) for s in (s0, s1) for t in (t0, t1)]
        return min(corners) <= 0.0 <= max(corners)

    boxes = [(0.0, 1.0, 0.0, 1.0)]
    for _ in range(_REFINE_LEVELS):
        new = []
        for s0, s1, t0, t1 in boxes:
            sm, tm = 0.5 * (s0 + s1), 0.5 * (t0 + t1)
            for bs0, bs1 in ((s0, sm), (sm, s1)):
                for bt0, bt1 in ((t0, tm), (tm, t1)):
                    if spans_zero(cx, bs0, bs1, bt0, bt1) and spans_zero(
                        cp, bs0, bs1, bt0, bt1
                    ):
                        new.append((bs0, bs1, bt0, bt1))
            if len(new) >= _REFINE_BOX_CAP:
                break
        if not new:
            return []
        boxes = new[:_REFINE_BOX_CAP]
        if boxes[0][1] - boxes[0][0] < 1e-13:
            break
    pts = []
    for s0, s1, t0, t1 in boxes:
        pts.append((0.5 * (s0 + s1), 0.5 * (t0 + t1)))
    # merge coincident boxes (non-degenerate zeros shatter into 4 neighbours)
    merged = []
    for s, t in pts:
        for k, (ms, mt, cnt) in enumerate(merged):
            if abs(ms / cnt - s) < 1e-9 and abs(mt / cnt - t) < 1e-9:
                merged[k] = (ms + s, mt + t, cnt + 1)
                break
        else:
            merged.append((s, t, 1))
    return [(ms / cnt, mt / cnt) for ms, mt, cnt in merged]


def stagnation_points(j, include_degenerate=False, noise_floor=_NOISE_FLOOR):
    """Isolated zeros of J with Poincare indices.

    Candidate cells are those whose corner values of both components span
    zero; candidates are refined by 2D bisection on the bilinear
    interpolants. Zeros that are not isolated (the field vanishes along a
    curve through them, e.g. along a Wigner-function zero line shared by
    both components) are recognised on a ring around the candidate: a
    shared zero curve forces both components to change sign at common
    ring angles, whereas at an isolated zero the component zero lines
    cross the ring at distinct angles. Degenerate candidates are dropped
    unless requested. Candidates whose whole neighbourhood sits below
    ``noise_floor`` times the grid maximum are quadrature-noise crossings
    and are discarded outright.
    """
    grid = j.grid
    jx, jp = j.j_x, j.j_p
    ev = BilinearField(j)
    max_mag = ev.max_mag
    if max_mag == 0.0:
        return []

    def spans(a):
        lo = np.minimum.reduce([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
        hi = np.maximum.reduce([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
        return (lo <= 0.0) & (hi >= 0.0)

    cand = np.argwhere(spans(jx) & spans(jp))
    raw_points = []
    for i, jc in cand:
        for s, t in _refine_cell(jx, jp, i, jc):
            raw_points.append(
                (grid.x[i] + s * grid.dx, grid.p[jc] + t * grid.dp)
            )

    # dedupe zeros found twice on shared cell edges
    sep = 1e-7 * min(grid.dx, grid.dp)
    points = []
    for x, p in raw_points:
        if all((x - q[0]) ** 2 + (p - q[1]) ** 2 > sep ** 2 for q in points):
            points.append((x, p))

    ring_r = 0.45 * min(grid.dx, grid.dp)
    test_r = 1.5 * min(grid.dx, grid.dp)
    angles = np.linspace(0.0, 2.0 * math.pi, _RING_SAMPLES, endpoint=False)
    test_angles = np.linspace(0.0, 2.0 * math.pi, _DEGENERACY_RING_SAMPLES,
                              endpoint=False)

    def clamp(x, p):
        return (min(max(x, grid.x_min), grid.x_max),
                min(max(p, grid.p_min), grid.p_max))

    def sign_change_angles(vals):
        s = np.sign(vals)
        s[s == 0.0] = 1.0
        return test_angles[np.nonzero(s != np.roll(s, -1))[0]]

    def angle_gap(a, b):
        d = abs(a - b) % (2.0 * math.pi)
        return min(d, 2.0 * math.pi - d)

    out = []
    for x, p in points:
        residual = float(np.hypot(*ev(x, p)))
        ring_max = max(
            float(np.hypot(*ev(*clamp(x + ring_r * math.cos(th),
                                      p + ring_r * math.sin(th)))))
            for th in angles
        )
        if ring_max < noise_floor * max_mag:
            continue
        ring = np.array([
            ev(*clamp(x + test_r * math.cos(th), p + test_r * math.sin(th)))
            for th in test_angles
        ])
        cross_x = sign_change_angles(ring[:, 0])
        cross_p = sign_change_angles(ring[:, 1])
        shared = any(
            angle_gap(a, b) < _DEGENERACY_ANGLE
            for a in cross_x for b in cross_p
        )
        degenerate = len(cross_x) == 0 or len(cross_p) == 0 or shared
        if degenerate and not include_degenerate:
            continue
        if degenerate:
            idx = 0
        else:
            loop = circle_loop((x, p), ring_r, 32)
            idx = poincare_index(ev, loop)
        out.append(StagnationPoint(x=x, p=p, index=idx, residual=residual,
                                   degenerate=degenerate))
    out.sort(key=lambda s: (s.x, s.p))
    return out


# ---------------------------------------------------------------------------
# Poincare index
# ---------------------------------------------------------------------------

@dataclass
class LoopPath:
    """Closed, self-avoiding, counterclockwise polygon."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise ValidationError("loop needs at least 3 (x, p) vertices")
        ring = LinearRing(v)
        if not ring.is_simple:
            raise ValidationError("loop is self-intersecting")
        if not ring.is_ccw:
            raise ValidationError("loop must be counterclockwise (signed area > 0)")
        self.vertices = v


def circle_loop(center, radius, n=64):
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return LoopPath(np.column_stack([
        center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)
    ]))


def poincare_index(j, loop):
    """Winding number of J's orientation along the loop.

    Wrapped atan2 increments are summed over the loop samples; any segment
    whose increment reaches pi/2 is bisected (the midpoint stays on the
    polygon chord) until the sampling theorem for winding numbers holds.
    """
    ev = _as_evaluator(j)
    pts = [tuple(v) for v in loop.vertices]
    vecs = [ev(x, p) for x, p in pts]
    mags = [float(np.hypot(*v)) for v in vecs]
    ref = max(mags)
    floor = 1e-12 * (ev.max_mag if isinstance(ev, BilinearField) else ref)
    if min(mags) <= floor:
        raise LoopThroughStagnationError("loop passes through a flow stagnation")
    angles = [math.atan2(v[1], v[0]) for v in vecs]

    def wrapped(d):
        return (d + math.pi) % (2.0 * math.pi) - math.pi

    i = 0
    while i < len(pts):
        a0 = angles[i]
        a1 = angles[(i + 1) % len(pts)]
        if abs(wrapped(a1 - a0)) < 0.5 * math.pi:
            i += 1
            continue
        if len(pts) >= _MAX_LOOP_SAMPLES:
            raise WindingNotConvergedError(
                "loop refinement exceeded the sample budget"
            )
        x0, p0 = pts[i]
        x1, p1 = pts[(i + 1) % len(pts)]
        xm, pm = 0.5 * (x0 + x1), 0.5 * (p0 + p1)
        v = ev(xm, pm)
        if float(np.hypot(*v)) <= floor:
            raise LoopThroughStagnationError("loop passes through a flow stagnation")
        pts.insert(i + 1, (xm, pm))
        angles.insert(i + 1, math.atan2(v[1], v[0]))

    total = sum(
        wrapped(angles[(i + 1) % len(angles)] - angles[i]) for i in range(len(angles))
    )
    winding = total / (2.0 * math.pi)
    return int(round(winding))


# ---------------------------------------------------------------------------
# streamlines
# ---------------------------------------------------------------------------

@dataclass
class Streamline:
    points: np.ndarray
    terminated: str  # "length", "boundary", "stagnation", "seed_stagnation"


def streamline(j, seed, step=1e-3, max_length=10.0, bounds=None,
               stagnation_threshold=None):
    """RK4 integration of the normalized flow direction from a seed point.

    The undirected line field of J is integrated: the unit direction is kept
    continuous with the previous step, so regions of flow inversion (W < 0)
    are traversed instead of reflecting the path at the zero line.
    """
    ev = _as_evaluator(j)
    if bounds is None and isinstance(ev, BilinearField):
        g = ev.grid
        bounds = (g.x_min, g.x_max, g.p_min, g.p_max)
    if stagnation_threshold is None:
        ref = ev.max_mag if isinstance(ev, BilinearField) else float(np.hypot(*ev(*seed)))
        stagnation_threshold = 1e-12 * ref

    def in_bounds(x, p):
        if bounds is None:
            return True
        return bounds[0] <= x <= bounds[1] and bounds[2] <= p <= bounds[3]

    def direction(x, p, prev):
        v = ev(x, p)
        mag = float(np.hypot(*v))
        if mag <= stagnation_threshold:
            return None
        d = v / mag
        if prev is not None and float(d @ prev) < 0.0:
            d = -d
        return d

    x, p = float(seed[0]), float(seed[1])
    d0 = direction(x, p, None)
    if d0 is None:
        return Streamline(np.array([[x, p]]), "seed_stagnation")

    pts = [(x, p)]
    prev = d0
    length = 0.0
    reason = "length"
    while length < max_length - 0.5 * step:
        k1 = direction(x, p, prev)
        if k1 is None:
            reason = "stagnation"
            break
        k2 = direction(x + 0.5 * step * k1[0], p + 0.5 * step * k1[1], k1)
        k3 = None if k2 is None else direction(
            x + 0.5 * step * k2[0], p + 0.5 * step * k2[1], k1
        )
        k4 = None if k3 is None else direction(
            x + step * k3[0], p + step * k3[1], k1
        )
        if k2 is None or k3 is None or k4 is None:
            reason = "stagnation"
            break
        move = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        x += step * move[0]
        p += step * move[1]
        if not in_bounds(x, p):
            reason = "boundary"
            break
        pts.append((x, p))
        prev = k1
        length += step
    return Streamline(np.array(pts), reason)


# ---------------------------------------------------------------------------
# pinch points
# ---------------------------------------------------------------------------

@dataclass
class PinchReport:
    pairs: list = field(default_factory=list)        # ((x,p) pinch, (x,p) stag, dist)
    unmatched_pinch: list = field(default_factory=list)
    unmatched_stagnation: list = field(default_factory=list)
    intersections: list = field(default_factory=list)


def _neighbourhood_max(values, grid, x, p):
    i = int(min(max((x - grid.x_min) / grid.dx, 1), grid.n_x - 2))
    k = int(min(max((p - grid.p_min) / grid.dp, 1), grid.n_p - 2))
    return float(np.abs(values[i - 1:i + 3, k - 1:k + 3]).max())


def _contour_sign_changes(verts, vals, closed, gate):
    """Zero crossings of ``vals`` sampled along a contour polyline.

    Only crossings separating runs whose magnitude reaches ``gate`` on both
    sides count: when the sampled quantity shares a zero curve with the
    contour itself (harmonic flow, where J_p carries a factor of W), the
    values along the whole contour are interpolation residue with random
    sign, and every flip there must be ignored.
    """
    n = len(vals)
    if n < 2:
        return []
    signs = np.sign(vals)
    for k in range(n):
        if signs[k] == 0.0:
            signs[k] = signs[k - 1] if k else 1.0

    # runs of constant sign; on a closed contour start the scan inside the
    # run containing the magnitude maximum so no run is split by wraparound
    order = np.arange(n)
    if closed:
        order = np.roll(order, -int(np.argmax(np.abs(vals))))
    runs = []
    for k in order:
        if runs and signs[k] == runs[-1][0]:
            runs[-1][2] = k
            runs[-1][3] = max(runs[-1][3], abs(vals[k]))
        else:
            runs.append([signs[k], k, k, abs(vals[k])])
    significant = [r for r in runs if r[3] >= gate]
    if not significant:
        return []
    if closed and len(significant) > 1 and significant[0][0] == significant[-1][0]:
        significant[0][1] = significant[-1][1]
        significant.pop()

    hits = []
    pairs = zip(significant, significant[1:] + ([significant[0]] if closed else []))
    for ra, rb in pairs:
        if ra[0] == rb[0]:
            continue
        # walk from the end of one significant run to the start of the next
        # and place the crossing where the magnitude is smallest
        k = ra[2]
        path = [k]
        while k != rb[1]:
            k = (k + 1) % n
            path.append(k)
        kmin = min(path, key=lambda q: abs(vals[q]))
        a = kmin
        b = (kmin + 1) % n if signs[kmin] == ra[0] else (kmin - 1) % n
        va, vb = vals[a], vals[b]
        t = 0.5 if va == vb else va / (va - vb)
        t = min(max(t, 0.0), 1.0)
        hits.append(tuple(verts[a] + t * (verts[b] - verts[a])))
    return hits


def pinch_point_report(w, j, stagnation, off_axis_band=2.0, match_distance=None,
                       jp_gate=3e-3):
    """Pair off-axis crossings of the W = 0 and J_p = 0 lines with stagnation points.

    Crossings are located as sign changes of J_p along each W zero contour.
    ``off_axis_band`` excludes |p| <= band * dp; ``match_distance`` defaults
    to two grid cells; ``jp_gate`` (times the global flow maximum) is the
    magnitude J_p must reach along the contour on both sides of a crossing.
    """
    grid = require_same_grid(w, j)
    if match_distance is None:
        match_distance = 2.0 * grid.dx
    w_contours = zero_contours(w, tag="wigner_zero")
    ev = BilinearField(j)
    gate = jp_gate * ev.max_mag

    # discard contour pieces buried in quadrature noise (genuine zero lines
    # border regions of significant |W|)
    floor = _NOISE_FLOOR * float(np.abs(w.values).max())

    cell = min(grid.dx, grid.dp)
    hits = []
    for contour in w_contours.contours:
        verts = contour.vertices
        if len(verts) < 2:
            continue
        local = max(
            _neighbourhood_max(w.values, grid, x, p) for x, p in verts[::4]
        )
        if local < floor:
            continue
        vals = np.array([ev(x, p)[1] for x, p in verts])
        hits.extend(_contour_sign_changes(verts, vals, contour.closed, gate))

    pinches = []
    for x, p in sorted(hits):
        if abs(p) <= off_axis_band * grid.dp:
            continue
        if all((x - q[0]) ** 2 + (p - q[1]) ** 2 > cell ** 2 for q in pinches):
            pinches.append((x, p))

    stags = [s for s in stagnation if not s.degenerate]
    report = PinchReport(intersections=pinches)
    claimed = set()
    for x, p in pinches:
        if stags:
            dists = [math.hypot(x - s.x, p - s.p) for s in stags]
            k = int(np.argmin(dists))
        else:
            k = None
        if k is not None and dists[k] < match_distance:
            report.pairs.append(((x, p), (stags[k].x, stags[k].p), dists[k]))
            claimed.add(k)
        else:
            report.unmatched_pinch.append((x, p))
    report.unmatched_stagnation = [
        (s.x, s.p) for k, s in enumerate(stags)
        if k not in claimed and abs(s.p) > off_axis_band * grid.dp
    ]
    return report
