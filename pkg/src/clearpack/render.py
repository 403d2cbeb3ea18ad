"""SVG rendering of layouts: one rectangle per object plus one shaded
clearance rectangle per nonzero clearance face.  Coordinates are exact until
the final pixel scaling; y grows upward in model space and is flipped for
SVG."""

from __future__ import annotations

from fractions import Fraction

from .packing import Instance, PackingSolution

SCALE = 6  # pixels per length unit


def render_svg(inst: Instance, sol: PackingSolution, scale: int = SCALE) -> str:
    height_units = max(inst.region.height, sol.height)
    width_px = float(inst.region.width * scale)
    height_px = float(height_units * scale)

    def px(x: Fraction) -> float:
        return float(x * scale)

    def flip(y: Fraction) -> float:
        return float((height_units - y) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px:.2f}" '
        f'height="{height_px:.2f}" viewBox="0 0 {width_px:.2f} {height_px:.2f}">',
        f'<rect class="region" x="0" y="0" width="{width_px:.2f}" height="{height_px:.2f}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    clearance_faces = []
    for obj in inst.objects:
        cx, cy = sol.centers[obj.id]
        left = cx - obj.dx / 2
        bottom = cy - obj.dy / 2
        faces = (
            ("xm", left - obj.clear_xm, bottom, obj.clear_xm, obj.dy),
            ("xp", left + obj.dx, bottom, obj.clear_xp, obj.dy),
            ("ym", left, bottom - obj.clear_ym, obj.dx, obj.clear_ym),
            ("yp", left, bottom + obj.dy, obj.dx, obj.clear_yp),
        )
        for face, fx, fy, fw, fh in faces:
            if fw > 0 and fh > 0:
                clearance_faces.append((obj.id, face, fx, fy, fw, fh))
    # clearances first so objects draw over them
    for oid, face, fx, fy, fw, fh in clearance_faces:
        parts.append(
            f'<rect class="clearance" data-object="{oid}" data-face="{face}" '
            f'x="{px(fx):.2f}" y="{flip(fy + fh):.2f}" width="{px(fw):.2f}" '
            f'height="{px(fh):.2f}" fill="#bbbbbb" fill-opacity="0.5" stroke="none"/>'
        )
    for obj in inst.objects:
        cx, cy = sol.centers[obj.id]
        left = cx - obj.dx / 2
        bottom = cy - obj.dy / 2
        parts.append(
            f'<rect class="object" data-object="{obj.id}" x="{px(left):.2f}" '
            f'y="{flip(bottom + obj.dy):.2f}" width="{px(obj.dx):.2f}" '
            f'height="{px(obj.dy):.2f}" fill="#7aa6d6" stroke="#b03a3a" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px(cx):.2f}" y="{flip(cy):.2f}" font-size="{scale * 2}" '
            f'text-anchor="middle" dominant-baseline="middle">{obj.id}</text>'
        )
    # achieved height line
    parts.append(
        f'<line class="height" x1="0" y1="{flip(sol.height):.2f}" x2="{width_px:.2f}" '
        f'y2="{flip(sol.height):.2f}" stroke="#2a7a2a" stroke-width="1" stroke-dasharray="4 3"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
