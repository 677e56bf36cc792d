//! OBJ meshes and the small text sidecars (seams, seam maps, symmetric pairs).
//!
//! OBJ indices are 1-based on disk. Sidecar files use 0-based vertex indices.
//! In memory `v` grows downward (image rows); OBJ `vt` stores `1 - v`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Point2, Point3};

use crate::atlas::{SeamSpec, UvAtlas};
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// A parsed OBJ file: the mesh, and the atlas when `vt` records are 1:1 with
/// vertices.
#[derive(Debug, Clone)]
pub struct ObjData {
    pub mesh: TriangleMesh,
    pub atlas: Option<UvAtlas>,
    /// One UV per vertex from the first face corner that references it, when
    /// every vertex has one. Useful for per-corner (multi-chart) UV layouts
    /// that have no 1:1 atlas.
    pub vertex_uv: Option<Vec<Point2<f64>>>,
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<ObjData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, path)
}

pub fn parse_obj(text: &str, path: &Path) -> Result<ObjData> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut positions = Vec::new();
    let mut uvs = Vec::new();
    let mut faces = Vec::new();
    // Whether every face corner's vt index equals its v index (or is absent).
    let mut uv_corners_match = true;
    let mut first_uv: Vec<Option<usize>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tok = line.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        match tag {
            "v" => {
                let xyz = parse_floats(&mut tok, 3).map_err(|m| err(lineno, m))?;
                positions.push(Point3::new(xyz[0], xyz[1], xyz[2]));
            }
            "vt" => {
                let uv = parse_floats(&mut tok, 2).map_err(|m| err(lineno, m))?;
                uvs.push(Point2::new(uv[0], 1.0 - uv[1]));
            }
            "f" => {
                let mut corners = Vec::new();
                for t in tok {
                    let mut parts = t.split('/');
                    let v = parts.next().unwrap_or("");
                    let vi = resolve_index(v, positions.len()).map_err(|m| err(lineno, m))?;
                    if let Some(vt) = parts.next().filter(|s| !s.is_empty()) {
                        let ti = resolve_index(vt, uvs.len()).map_err(|m| err(lineno, m))?;
                        if ti != vi {
                            uv_corners_match = false;
                        }
                        if first_uv.len() <= vi {
                            first_uv.resize(vi + 1, None);
                        }
                        first_uv[vi].get_or_insert(ti);
                    }
                    corners.push(vi);
                }
                if corners.len() < 3 {
                    return Err(err(lineno, format!("face with {} corners", corners.len())));
                }
                for k in 1..corners.len() - 1 {
                    faces.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }

    let mesh = TriangleMesh::new(positions, faces)?;
    let vertex_uv = (first_uv.len() == mesh.vertex_count())
        .then(|| first_uv.iter().map(|t| t.map(|t| uvs[t])).collect::<Option<Vec<_>>>())
        .flatten();
    let atlas = if !uvs.is_empty() && uvs.len() == mesh.vertex_count() && uv_corners_match {
        Some(UvAtlas::new(uvs)?)
    } else {
        None
    };
    Ok(ObjData { mesh, atlas, vertex_uv })
}

fn parse_floats<'a>(tok: &mut impl Iterator<Item = &'a str>, n: usize) -> std::result::Result<Vec<f64>, String> {
    let vals: Vec<f64> = tok
        .take(n)
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    if vals.len() != n {
        return Err(format!("expected {n} numbers, found {}", vals.len()));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err("non-finite coordinate".to_string());
    }
    Ok(vals)
}

/// OBJ index (1-based, negative = relative) to 0-based. Range checks against
/// the vertex count happen in mesh validation; relative indices are resolved
/// against the records read so far.
fn resolve_index(t: &str, count_so_far: usize) -> std::result::Result<usize, String> {
    let i: i64 = t.parse().map_err(|_| format!("bad index `{t}`"))?;
    match i {
        0 => Err("index 0 is invalid in OBJ".to_string()),
        i if i > 0 => Ok((i - 1) as usize),
        i => {
            let back = (-i) as usize;
            if back > count_so_far {
                Err(format!("relative index {i} before start of file"))
            } else {
                Ok(count_so_far - back)
            }
        }
    }
}

/// Writes `v` records, `vt` records when an atlas is given (1:1 with vertices),
/// and `f a/a b/b c/c` faces.
pub fn save_obj(path: impl AsRef<Path>, mesh: &TriangleMesh, atlas: Option<&UvAtlas>) -> Result<()> {
    let path = path.as_ref();
    if let Some(a) = atlas {
        if a.len() != mesh.vertex_count() {
            return Err(Error::shape(format!(
                "atlas has {} coordinates, mesh has {} vertices",
                a.len(),
                mesh.vertex_count()
            )));
        }
    }
    fs::write(path, format_obj(mesh, atlas)).map_err(|e| Error::io(path, e))
}

pub fn format_obj(mesh: &TriangleMesh, atlas: Option<&UvAtlas>) -> String {
    let mut s = String::new();
    for p in mesh.positions() {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    if let Some(a) = atlas {
        for uv in a.coords() {
            let _ = writeln!(s, "vt {} {}", uv.x, 1.0 - uv.y);
        }
        for f in mesh.faces() {
            let _ = writeln!(s, "f {0}/{0} {1}/{1} {2}/{2}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
    } else {
        for f in mesh.faces() {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
    }
    s
}

fn read_records(path: &Path, tag: Option<&str>, arity: usize) -> Result<Vec<(usize, Vec<usize>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        if let Some(tag) = tag {
            let t = tok.next().unwrap_or("");
            if t != tag {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: format!("expected `{tag}` record, found `{t}`"),
                });
            }
        }
        let vals: std::result::Result<Vec<usize>, _> = tok.map(str::parse::<usize>).collect();
        match vals {
            Ok(v) if v.len() == arity => out.push((lineno + 1, v)),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: format!("expected {arity} vertex indices"),
                })
            }
        }
    }
    Ok(out)
}

/// Seam file: one `edge i j` line per cut edge.
pub fn load_seam(path: impl AsRef<Path>) -> Result<SeamSpec> {
    let edges = read_records(path.as_ref(), Some("edge"), 2)?
        .into_iter()
        .map(|(_, v)| (v[0], v[1]))
        .collect();
    Ok(SeamSpec::new(edges))
}

pub fn save_seam(path: impl AsRef<Path>, seam: &SeamSpec) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    for &(a, b) in seam.edges() {
        let _ = writeln!(s, "edge {a} {b}");
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Symmetry file: `pair i j` lines, each pair listed once; unlisted vertices
/// are their own mirror. Returns the per-vertex mirror map.
pub fn load_symmetry(path: impl AsRef<Path>, vertex_count: usize) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let mut pairs: Vec<usize> = (0..vertex_count).collect();
    let mut set = vec![false; vertex_count];
    for (line, v) in read_records(path, Some("pair"), 2)? {
        let (i, j) = (v[0], v[1]);
        let bad = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        if i >= vertex_count || j >= vertex_count {
            return Err(bad(format!("pair ({i}, {j}) out of range for {vertex_count} vertices")));
        }
        if (set[i] && pairs[i] != j) || (set[j] && pairs[j] != i) {
            return Err(bad(format!("vertex paired twice in ({i}, {j})")));
        }
        pairs[i] = j;
        pairs[j] = i;
        set[i] = true;
        set[j] = true;
    }
    Ok(pairs)
}

pub fn save_symmetry(path: impl AsRef<Path>, pairs: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    for (i, &j) in pairs.iter().enumerate() {
        if i <= j {
            let _ = writeln!(s, "pair {i} {j}");
        }
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Seam-map sidecar: `open_idx orig_idx` lines.
pub fn load_seam_map(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let recs = read_records(path, None, 2)?;
    let mut map = vec![usize::MAX; recs.len()];
    for (line, v) in recs {
        if v[0] >= map.len() || map[v[0]] != usize::MAX {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("open index {} duplicated or out of range", v[0]),
            });
        }
        map[v[0]] = v[1];
    }
    Ok(map)
}

pub fn save_seam_map(path: impl AsRef<Path>, seam_map: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    for (open, orig) in seam_map.iter().enumerate() {
        let _ = writeln!(s, "{open} {orig}");
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Vertex-list file (e.g. weight-map seeds): one `vertex i` line each.
pub fn load_vertex_list(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    Ok(read_records(path.as_ref(), Some("vertex"), 1)?
        .into_iter()
        .map(|(_, v)| v[0])
        .collect())
}

pub fn save_vertex_list(path: impl AsRef<Path>, vertices: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "vertex {v}");
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Loads an open mesh with `vt` records plus its seam-map sidecar.
pub fn load_atlas(obj: impl AsRef<Path>, seam_map: Option<&Path>) -> Result<(TriangleMesh, UvAtlas)> {
    let obj = obj.as_ref();
    let data = load_mesh(obj)?;
    let atlas = data.atlas.ok_or_else(|| Error::Parse {
        path: obj.to_path_buf(),
        line: 0,
        msg: "no per-vertex vt records".to_string(),
    })?;
    let atlas = match seam_map {
        Some(p) => {
            let map = load_seam_map(p)?;
            atlas.replace_seam_map(map)?
        }
        None => atlas,
    };
    Ok((data.mesh, atlas))
}

impl UvAtlas {
    pub(crate) fn replace_seam_map(&self, seam_map: Vec<usize>) -> Result<Self> {
        UvAtlas::with_seam_map(self.coords().to_vec(), seam_map)
    }
}
