"""Smoke test for the uvkit extension module on the bundled humanoid.

Run after `pip install -e crates/py --no-build-isolation`:

    python3 python/smoke_test.py
"""

import math
import sys
import tempfile
from pathlib import Path

import uvkit

ASSETS = Path(__file__).resolve().parent.parent / "crates" / "core" / "assets"
CAMERA = (120.0, 128.0, 20.0)


def check(cond, what):
    if not cond:
        raise AssertionError(what)
    print(f"ok  {what}")


def main():
    mesh = uvkit.load_mesh(ASSETS / "humanoid.obj")
    check(mesh.vertex_count == 630 and mesh.is_closed(), "humanoid loads closed with 630 vertices")
    pairs = uvkit.load_symmetry(ASSETS / "humanoid.sym", mesh.vertex_count)
    mesh = uvkit.Mesh(mesh.positions, mesh.faces, pairs)
    seam = uvkit.load_seam(ASSETS / "humanoid.seam")

    open_mesh, atlas, report = uvkit.build_continuous_atlas(mesh, seam)
    check(report["energy_after"] < report["energy_before"], "distortion descent lowers the energy")
    check(report["symmetry_residual"] <= 1e-6, "atlas is mirror symmetric")
    check(atlas.flipped_faces(open_mesh) == [], "no flipped faces")

    s1, s2 = uvkit.similarity(mesh, atlas.per_original_vertex(), stride=4)
    frag_mesh, frag_atlas = uvkit.load_atlas(
        ASSETS / "humanoid_fragmented.obj", ASSETS / "humanoid_fragmented.seammap"
    )
    f1, f2 = uvkit.similarity(mesh, frag_atlas.per_original_vertex(), stride=4)
    check(s1 > f1 and s2 > f2, f"continuous S1/S2 {s1:.3f}/{s2:.3f} beat fragmented {f1:.3f}/{f2:.3f}")

    lmap = uvkit.encode_location_map(open_mesh, atlas, 128, 128)
    decoded = uvkit.decode_vertices(lmap, atlas)
    err = max(math.dist(a, b) for a, b in zip(decoded, open_mesh.positions))
    check(err < 0.05, f"location map decodes within {err:.4f}")

    iuv = uvkit.render_iuv(open_mesh, atlas, CAMERA, 256, 256)
    check(iuv.foreground_count() > 0, f"{iuv.foreground_count()} foreground pixels")
    con = uvkit.loss_consistent(lmap, iuv, CAMERA)
    check(0.0 <= con <= 1.0, f"consistency loss {con:.4f} px^2 within the floor")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "location.uvt"
        lmap.save(path)
        back = uvkit.LocationMap.load(path)
        drift = max(math.dist(a, b) for a, b in zip(back.values, lmap.values))
        check(back.mask == lmap.mask and drift < 1e-6, f"UVT round trip keeps float32 precision ({drift:.1e})")

    pts = open_mesh.positions[:14]
    check(uvkit.mpjpe(pts, pts) == 0.0, "MPJPE of identical joints is zero")
    moved = [(2 * x + 0.1, 2 * y, 2 * z - 0.3) for x, y, z in pts]
    aligned, scale, _, _ = uvkit.procrustes_align(moved, pts)
    check(abs(scale - 0.5) < 1e-9, "procrustes recovers the scale")
    check(uvkit.mpjpe(moved, pts, procrustes=True) < 1e-6, "PA-MPJPE removes a similarity")

    try:
        uvkit.Mesh([(0, 0, 0), (1, 0, 0)], [[0, 1, 5]])
    except ValueError as e:
        check("vertex 5" in str(e), "bad faces raise ValueError")
    else:
        raise AssertionError("bad faces accepted")
    print("smoke test passed")


if __name__ == "__main__":
    sys.exit(main())
