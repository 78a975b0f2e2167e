"""Self-contained SVG renderings of analysis results (no plotting library)."""

from __future__ import annotations

from .errors import EmptyGrid
from .spatial import HeatmapGrid

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
          "#17becf", "#e377c2", "#7f7f7f", "#bcbd22"]

_NEG = (33, 102, 172)    # r = -1
_MID = (247, 247, 247)   # r = 0
_POS = (178, 24, 43)     # r = +1


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _diverging_color(r: float) -> str:
    r = max(-1.0, min(1.0, r))
    if r >= 0:
        a, b, t = _MID, _POS, r
    else:
        a, b, t = _MID, _NEG, -r
    rgb = tuple(round(a[i] + (b[i] - a[i]) * t) for i in range(3))
    return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"


def _header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica,Arial,sans-serif">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{width / 2:.0f}" y="26" text-anchor="middle" font-size="17" '
        f'font-weight="bold">{_esc(title)}</text>',
    ]


def _axes(lines: list[str], x0: float, y0: float, x1: float, y1: float,
          x_label: str, y_label: str) -> None:
    lines.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#000" stroke-width="1.5"/>')
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000" stroke-width="1.5"/>')
    lines.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{y1 + 36:.0f}" text-anchor="middle" font-size="13">{_esc(x_label)}</text>')
    lines.append(f'<text x="{x0 - 46:.0f}" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 {x0 - 46:.0f} {(y0 + y1) / 2:.0f})">{_esc(y_label)}</text>')


def _poly(xs, ys, color: str, width: float = 2.0, dash: str | None = None) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{pts}"/>'


def _curve_chart(series: list[tuple[str, list[float], list[float]]], title: str,
                 x_label: str, y_label: str, y_lo: float, y_hi: float) -> str:
    width, height = 900, 540
    x0, y0, x1, y1 = 80, 60, 660, 470
    xs_all = [x for _, xs, _ in series for x in xs]
    if not xs_all:
        raise EmptyGrid("no curves to render")
    x_lo, x_hi = min(xs_all), max(xs_all)
    span = (x_hi - x_lo) or 1.0

    def px(x): return x0 + (x - x_lo) / span * (x1 - x0)
    def py(y): return y1 - (y - y_lo) / (y_hi - y_lo) * (y1 - y0)

    lines = _header(width, height, title)
    for i in range(5):
        yv = y_lo + (y_hi - y_lo) * i / 4
        lines.append(f'<line x1="{x0}" y1="{py(yv):.1f}" x2="{x1}" y2="{py(yv):.1f}" stroke="#ddd"/>')
        lines.append(f'<text x="{x0 - 8}" y="{py(yv) + 4:.1f}" text-anchor="end" font-size="11">{yv:.2f}</text>')
    for i in range(5):
        xv = x_lo + span * i / 4
        lines.append(f'<text x="{px(xv):.1f}" y="{y1 + 18}" text-anchor="middle" font-size="11">{xv:.0f}</text>')
    for idx, (label, xs, ys) in enumerate(series):
        color = COLORS[idx % len(COLORS)]
        lines.append(_poly([px(x) for x in xs], [py(y) for y in ys], color))
        ly = y0 + 18 * idx
        lines.append(f'<line x1="{x1 + 16}" y1="{ly}" x2="{x1 + 44}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        lines.append(f'<text x="{x1 + 50}" y="{ly + 4}" font-size="12">{_esc(label)}</text>')
    _axes(lines, x0, y0, x1, y1, x_label, y_label)
    lines.append("</svg>")
    return "\n".join(lines)


def _profile_series(report: dict, value_fn) -> list[tuple[str, list[float], list[float]]]:
    series = []
    cond_names = {str(c["config_state_id"]): c["name"] for c in report["conditions"]}
    for cid in sorted(report["profiles"]):
        for key in sorted(report["profiles"][cid]):
            p = report["profiles"][cid][key]
            xs = [p["start_ps"] + p["step_ps"] * k for k in range(len(p["ber"]))]
            ys = [value_fn(b) for b in p["ber"]]
            series.append((f'{cond_names[cid]} {p["label"]}', xs, ys))
    return series


def render_profiles_svg(report: dict) -> str:
    """Error-rate versus sampling phase for every tap and condition."""
    return _curve_chart(_profile_series(report, lambda b: b),
                        "BER versus sampling phase", "sampling phase (ps)",
                        "bit error rate", 0.0, 1.0)


def render_cdf_svg(report: dict) -> str:
    """Empirical delay CDFs (F = 1 - BER)."""
    return _curve_chart(_profile_series(report, lambda b: 1.0 - b),
                        "Delay CDFs from phase-swept error rates",
                        "sampling phase (ps)", "F = 1 - BER", 0.0, 1.0)


def render_delta_chart_svg(report: dict) -> str:
    """Per-tap median shift and spread change for each stressed condition."""
    width, height = 900, 560
    cond_names = {str(c["config_state_id"]): c["name"] for c in report["conditions"]}
    deltas = report["delta_stats"]
    if not deltas or all(not v for v in deltas.values()):
        raise EmptyGrid("no delta statistics to render")
    lines = _header(width, height, "Median shift and spread change per tap")
    panels = (("delta_mu_ps", "delta mu (ps)", 60), ("delta_sigma_ps", "delta sigma (ps)", 320))
    for field, label, top in panels:
        vals = [(cid, key, deltas[cid][key]) for cid in sorted(deltas)
                for key in sorted(deltas[cid])]
        v_max = max(abs(v[2][field]) for v in vals) or 1.0
        x0, y0, x1, y1 = 80, top, 660, top + 200
        zero_y = (y0 + y1) / 2
        lines.append(f'<line x1="{x0}" y1="{zero_y}" x2="{x1}" y2="{zero_y}" stroke="#999"/>')
        bw = (x1 - x0) / max(len(vals), 1)
        for i, (cid, key, d) in enumerate(vals):
            color = COLORS[int(cid) % len(COLORS)]
            h = (d[field] / v_max) * (y1 - y0) / 2
            x = x0 + i * bw + bw * 0.15
            y = zero_y - max(h, 0)
            lines.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{bw * 0.7:.1f}" '
                         f'height="{abs(h):.1f}" fill="{color}"/>')
            lines.append(f'<text x="{x + bw * 0.35:.1f}" y="{y1 + 14}" text-anchor="middle" '
                         f'font-size="9">{_esc(d["label"])}</text>')
        lines.append(f'<text x="{x0 - 50}" y="{(y0 + y1) / 2:.0f}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 {x0 - 50} {(y0 + y1) / 2:.0f})">{_esc(label)}</text>')
        lines.append(f'<text x="{x0 - 8}" y="{y0 + 10}" text-anchor="end" font-size="10">{v_max:.1f}</text>')
        lines.append(f'<text x="{x0 - 8}" y="{y1}" text-anchor="end" font-size="10">{-v_max:.1f}</text>')
    for idx, cid in enumerate(sorted(deltas)):
        ly = 36 + 16 * idx
        color = COLORS[int(cid) % len(COLORS)]
        lines.append(f'<rect x="700" y="{ly - 10}" width="14" height="14" fill="{color}"/>')
        lines.append(f'<text x="720" y="{ly + 2}" font-size="12">{_esc(cond_names[cid])}</text>')
    lines.append("</svg>")
    return "\n".join(lines)


def render_correlation_svg(report: dict) -> str:
    """Pairwise correlation versus monitor separation, with binned means."""
    width, height = 900, 540
    x0, y0, x1, y1 = 80, 60, 660, 470
    cond_names = {str(c["config_state_id"]): c["name"] for c in report["conditions"]}
    curves = {cid: c for cid, c in report["correlation"].items() if c}
    if not curves:
        raise EmptyGrid("no correlation curves to render")
    max_d = max(p["distance_clb"] for c in curves.values() for p in c["pairs"]) or 1.0

    def px(d): return x0 + d / max_d * (x1 - x0)
    def py(r): return y1 - (r + 1.0) / 2.0 * (y1 - y0)

    lines = _header(width, height, "Delay correlation versus monitor separation")
    for rv in (-1.0, -0.5, 0.0, 0.5, 1.0):
        lines.append(f'<line x1="{x0}" y1="{py(rv):.1f}" x2="{x1}" y2="{py(rv):.1f}" stroke="#ddd"/>')
        lines.append(f'<text x="{x0 - 8}" y="{py(rv) + 4:.1f}" text-anchor="end" font-size="11">{rv:.1f}</text>')
    for i in range(5):
        dv = max_d * i / 4
        lines.append(f'<text x="{px(dv):.1f}" y="{y1 + 18}" text-anchor="middle" font-size="11">{dv:.1f}</text>')
    for idx, cid in enumerate(sorted(curves)):
        c = curves[cid]
        color = COLORS[int(cid) % len(COLORS)]
        for p in c["pairs"]:
            lines.append(f'<circle cx="{px(p["distance_clb"]):.1f}" cy="{py(p["r"]):.1f}" '
                         f'r="2.5" fill="{color}" fill-opacity="0.45"/>')
        xs = [px(b["distance_clb"]) for b in c["binned"]]
        ys = [py(b["mean_r"]) for b in c["binned"]]
        if len(xs) > 1:
            lines.append(_poly(xs, ys, color, 2.5))
        ly = y0 + 18 * idx
        label = (f'{cond_names[cid]} (decay {c["decay_length_clb"]:.1f} CLB, '
                 f'{c["decay_fit_method"]})')
        lines.append(f'<line x1="{x1 + 16}" y1="{ly}" x2="{x1 + 44}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        lines.append(f'<text x="{x1 + 50}" y="{ly + 4}" font-size="11">{_esc(label)}</text>')
    _axes(lines, x0, y0, x1, y1, "separation (CLB)", "pearson r")
    lines.append("</svg>")
    return "\n".join(lines)


def _heatmap_cells(heatmap) -> tuple[tuple[int, int], list[tuple[int, int, float]]]:
    if isinstance(heatmap, HeatmapGrid):
        ref = heatmap.reference_position
        cells = [(pos[0], pos[1], r) for pos, r in heatmap.cells.values()]
    else:
        ref = (heatmap["reference"]["x"], heatmap["reference"]["y"])
        cells = [(c["x"], c["y"], c["r"]) for c in heatmap["cells"]]
    return ref, cells


def render_heatmap_svg(heatmap, title: str = "Spatial correlation heatmap") -> str:
    """2-D correlation map referenced to one monitor (ring-marked).

    Accepts a HeatmapGrid or its report-dict form. Cell color spans the
    documented [-1, 1] diverging scale.
    """
    ref, cells = _heatmap_cells(heatmap)
    if not cells:
        raise EmptyGrid("heatmap has no instrumented cells")
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    nx, ny = max(xs) + 1, max(ys) + 1
    cell = max(18, min(48, 480 // max(nx, ny)))
    x_off, y_off = 80, 70
    width = x_off + nx * cell + 180
    height = y_off + ny * cell + 80
    lines = _header(width, height, title)
    for x, y, r in sorted(cells):
        px = x_off + x * cell
        py = y_off + (ny - 1 - y) * cell
        lines.append(f'<rect x="{px}" y="{py}" width="{cell - 2}" height="{cell - 2}" '
                     f'fill="{_diverging_color(r)}" stroke="#888" stroke-width="0.5">'
                     f'<title>({x},{y}) r={r:.3f}</title></rect>')
        lines.append(f'<text x="{px + cell / 2 - 1:.1f}" y="{py + cell / 2 + 3:.1f}" '
                     f'text-anchor="middle" font-size="{max(7, cell // 4)}" '
                     f'fill="#222">{r:.2f}</text>')
    rx = x_off + ref[0] * cell + (cell - 2) / 2
    ry = y_off + (ny - 1 - ref[1]) * cell + (cell - 2) / 2
    lines.append(f'<circle cx="{rx:.1f}" cy="{ry:.1f}" r="{cell * 0.42:.1f}" fill="none" '
                 f'stroke="#000" stroke-width="2.5"/>')
    lines.append(f'<text x="{x_off}" y="{y_off + ny * cell + 24}" font-size="11">'
                 f'ring = reference monitor at ({ref[0]},{ref[1]})</text>')
    # color legend, r in [-1, 1]
    lx = x_off + nx * cell + 30
    for i in range(101):
        r = -1.0 + 2.0 * i / 100
        ly = y_off + (ny * cell) * (1 - i / 100)
        lines.append(f'<rect x="{lx}" y="{ly:.1f}" width="18" height="{ny * cell / 100 + 1:.1f}" '
                     f'fill="{_diverging_color(r)}"/>')
    for r, frac in ((-1.0, 1.0), (0.0, 0.5), (1.0, 0.0)):
        ly = y_off + ny * cell * frac
        lines.append(f'<text x="{lx + 24}" y="{ly + 4:.1f}" font-size="11">{r:+.1f}</text>')
    lines.append("</svg>")
    return "\n".join(lines)


def render_report_artifacts(report: dict, kinds: list[str]) -> dict[str, str]:
    """Render the requested artifact kinds from a report dict."""
    out: dict[str, str] = {}
    for kind in kinds:
        if kind == "profiles":
            out["profiles.svg"] = render_profiles_svg(report)
        elif kind == "cdf":
            out["cdf.svg"] = render_cdf_svg(report)
        elif kind == "delta":
            if any(report["delta_stats"].values()):
                out["delta.svg"] = render_delta_chart_svg(report)
        elif kind == "correlation":
            if any(report["correlation"].values()):
                out["correlation.svg"] = render_correlation_svg(report)
        elif kind == "heatmap":
            for cid, hm in sorted(report["heatmaps"].items()):
                if hm:
                    name = next(c["name"] for c in report["conditions"]
                                if str(c["config_state_id"]) == cid)
                    out[f"heatmap_{name}.svg"] = render_heatmap_svg(
                        hm, f"Spatial correlation heatmap: {name}")
    return out
