//! Python bindings. Points cross the boundary as tuples, grids as flat
//! row-major lists.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use uvkit::atlas::{self as core_atlas, AtlasConfig, Boundary, DistortionConfig, SeamSpec};
use uvkit::codec;
use uvkit::distance::{surface_distance_matrix_sampled, uv_distance_matrix_sampled};
use uvkit::measures::{self, Alignment, Joints3, Reduction};
use uvkit::uvt::{read_uvt, write_uvt, UvtTensor};
use uvkit::{io, SurfaceMetric};

type P2 = (f64, f64);
type P3 = (f64, f64, f64);
type Aligned = (Vec<P3>, f64, [[f64; 3]; 3], P3);

fn py_err(e: uvkit::Error) -> PyErr {
    match e {
        uvkit::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for uvkit::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn to_p3(points: &[nalgebra::Point3<f64>]) -> Vec<P3> {
    points.iter().map(|p| (p.x, p.y, p.z)).collect()
}

fn from_p3(points: &[P3]) -> Vec<nalgebra::Point3<f64>> {
    points.iter().map(|&(x, y, z)| nalgebra::Point3::new(x, y, z)).collect()
}

fn camera((s, tx, ty): P3) -> PyResult<codec::Camera> {
    codec::Camera::new(s, tx, ty).py()
}

fn metric(name: &str) -> PyResult<SurfaceMetric> {
    match name {
        "edge" => Ok(SurfaceMetric::EdgeLength),
        "hop" => Ok(SurfaceMetric::HopCount),
        _ => Err(PyValueError::new_err(format!("metric must be 'edge' or 'hop', got {name:?}"))),
    }
}

fn reduction(name: &str) -> PyResult<Reduction> {
    match name {
        "mean" => Ok(Reduction::Mean),
        "sum" => Ok(Reduction::Sum),
        _ => Err(PyValueError::new_err(format!("reduction must be 'mean' or 'sum', got {name:?}"))),
    }
}

#[pyclass(module = "uvkit", name = "Mesh", frozen, from_py_object)]
#[derive(Clone)]
struct PyMesh(uvkit::TriangleMesh);

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (positions, faces, symmetric_pairs=None))]
    fn new(positions: Vec<P3>, faces: Vec<[usize; 3]>, symmetric_pairs: Option<Vec<usize>>) -> PyResult<Self> {
        let mut mesh = uvkit::TriangleMesh::new(from_p3(&positions), faces).py()?;
        if let Some(pairs) = symmetric_pairs {
            mesh = mesh.with_symmetric_pairs(pairs).py()?;
        }
        Ok(Self(mesh))
    }

    #[getter]
    fn positions(&self) -> Vec<P3> {
        to_p3(self.0.positions())
    }

    #[getter]
    fn faces(&self) -> Vec<[usize; 3]> {
        self.0.faces().to_vec()
    }

    #[getter]
    fn symmetric_pairs(&self) -> Option<Vec<usize>> {
        self.0.symmetric_pairs().map(<[usize]>::to_vec)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.0.face_count()
    }

    fn is_closed(&self) -> bool {
        self.0.is_closed()
    }

    fn with_positions(&self, positions: Vec<P3>) -> PyResult<Self> {
        self.0.with_positions(from_p3(&positions)).py().map(Self)
    }

    fn __repr__(&self) -> String {
        format!("Mesh(vertices={}, faces={})", self.0.vertex_count(), self.0.face_count())
    }
}

#[pyclass(module = "uvkit", name = "Atlas", frozen, from_py_object)]
#[derive(Clone)]
struct PyAtlas(uvkit::UvAtlas);

#[pymethods]
impl PyAtlas {
    #[new]
    #[pyo3(signature = (coords, seam_map=None))]
    fn new(coords: Vec<P2>, seam_map: Option<Vec<usize>>) -> PyResult<Self> {
        let coords: Vec<_> = coords.iter().map(|&(u, v)| nalgebra::Point2::new(u, v)).collect();
        match seam_map {
            Some(map) => uvkit::UvAtlas::with_seam_map(coords, map),
            None => uvkit::UvAtlas::new(coords),
        }
        .py()
        .map(Self)
    }

    #[getter]
    fn coords(&self) -> Vec<P2> {
        self.0.coords().iter().map(|p| (p.x, p.y)).collect()
    }

    #[getter]
    fn seam_map(&self) -> Vec<usize> {
        self.0.seam_map().to_vec()
    }

    /// One UV per vertex of the uncut mesh, for scoring against it.
    fn per_original_vertex(&self) -> Vec<P2> {
        self.0.per_original_vertex().iter().map(|p| (p.x, p.y)).collect()
    }

    fn flipped_faces(&self, mesh: &PyMesh) -> Vec<usize> {
        self.0.flipped_faces(&mesh.0)
    }

    fn energy(&self, mesh: &PyMesh) -> PyResult<f64> {
        core_atlas::area_distortion_energy(&self.0, &mesh.0).py()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(module = "uvkit", name = "LocationMap", frozen)]
struct PyLocationMap(codec::LocationMap);

#[pymethods]
impl PyLocationMap {
    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    /// Row-major texel values; invalid texels hold (0, 0, 0).
    #[getter]
    fn values(&self) -> Vec<P3> {
        to_p3(self.0.values())
    }

    #[getter]
    fn mask(&self) -> Vec<bool> {
        self.0.mask().to_vec()
    }

    fn sample(&self, u: f64, v: f64) -> Option<P3> {
        self.0.sample(u, v).map(|p| (p.x, p.y, p.z))
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        write_uvt(path, &UvtTensor::from(&self.0)).py()
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        codec::LocationMap::try_from(&read_uvt(path).py()?).py().map(Self)
    }
}

#[pyclass(module = "uvkit", name = "IuvImage", frozen)]
struct PyIuvImage(codec::IuvImage);

#[pymethods]
impl PyIuvImage {
    #[new]
    fn new(height: usize, width: usize, fore: Vec<f64>, uv: Vec<P2>) -> PyResult<Self> {
        let uv = uv.iter().map(|&(u, v)| nalgebra::Point2::new(u, v)).collect();
        codec::IuvImage::new(height, width, fore, uv).py().map(Self)
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn fore(&self) -> Vec<f64> {
        self.0.fore().to_vec()
    }

    #[getter]
    fn uv(&self) -> Vec<P2> {
        self.0.uv().iter().map(|p| (p.x, p.y)).collect()
    }

    #[pyo3(signature = (threshold=codec::DEFAULT_THRESHOLD))]
    fn foreground_count(&self, threshold: f64) -> usize {
        self.0.foreground(threshold).count()
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        write_uvt(path, &UvtTensor::from(&self.0)).py()
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        codec::IuvImage::try_from(&read_uvt(path).py()?).py().map(Self)
    }
}

#[pyfunction]
fn load_mesh(path: PathBuf) -> PyResult<PyMesh> {
    io::load_mesh(path).py().map(|d| PyMesh(d.mesh))
}

/// Open mesh plus atlas from an OBJ with 1:1 `vt`, and its seam map if given.
#[pyfunction]
#[pyo3(signature = (obj, seam_map=None))]
fn load_atlas(obj: PathBuf, seam_map: Option<PathBuf>) -> PyResult<(PyMesh, PyAtlas)> {
    let (mesh, atlas) = io::load_atlas(obj, seam_map.as_deref()).py()?;
    Ok((PyMesh(mesh), PyAtlas(atlas)))
}

#[pyfunction]
fn load_seam(path: PathBuf) -> PyResult<Vec<(usize, usize)>> {
    io::load_seam(path).py().map(|s| s.edges().to_vec())
}

#[pyfunction]
fn load_symmetry(path: PathBuf, vertex_count: usize) -> PyResult<Vec<usize>> {
    io::load_symmetry(path, vertex_count).py()
}

#[pyfunction]
fn load_vertex_list(path: PathBuf) -> PyResult<Vec<usize>> {
    io::load_vertex_list(path).py()
}

#[pyfunction]
#[pyo3(signature = (path, mesh, atlas=None))]
fn save_obj(path: PathBuf, mesh: &PyMesh, atlas: Option<&PyAtlas>) -> PyResult<()> {
    io::save_obj(path, &mesh.0, atlas.map(|a| &a.0)).py()
}

/// Cut, flatten, minimize area distortion and symmetrize. Returns
/// `(open_mesh, atlas, report)`.
#[pyfunction]
#[pyo3(signature = (mesh, seam, boundary="circle", max_iters=None, symmetrize=true))]
fn build_continuous_atlas<'py>(
    py: Python<'py>,
    mesh: &PyMesh,
    seam: Vec<(usize, usize)>,
    boundary: &str,
    max_iters: Option<usize>,
    symmetrize: bool,
) -> PyResult<(PyMesh, PyAtlas, Bound<'py, PyDict>)> {
    let boundary = match boundary {
        "circle" => Boundary::Circle,
        "square" => Boundary::Square,
        _ => return Err(PyValueError::new_err(format!("boundary must be 'circle' or 'square', got {boundary:?}"))),
    };
    let mut distortion = DistortionConfig::default();
    if let Some(n) = max_iters {
        distortion.max_iters = n;
    }
    let config = AtlasConfig {
        boundary,
        distortion,
        skip_symmetry: !symmetrize,
    };
    let built = py
        .detach(|| core_atlas::build_continuous_atlas(&mesh.0, &SeamSpec::new(seam), &config))
        .py()?;
    let report = PyDict::new(py);
    report.set_item("energy_before", built.distortion.energy_before)?;
    report.set_item("energy_after", built.distortion.energy_after)?;
    report.set_item("final_energy", built.final_energy)?;
    report.set_item("iterations", built.distortion.iterations)?;
    report.set_item("symmetry_residual", built.symmetry_residual)?;
    Ok((PyMesh(built.open_mesh), PyAtlas(built.atlas), report))
}

/// `(S1, S2)` between the surface graph distances of `mesh` and the
/// distances between `coords`, one per mesh vertex.
#[pyfunction]
#[pyo3(signature = (mesh, coords, metric="edge", stride=1))]
fn similarity(py: Python<'_>, mesh: &PyMesh, coords: Vec<P2>, metric: &str, stride: usize) -> PyResult<(f64, f64)> {
    let metric = self::metric(metric)?;
    let coords: Vec<_> = coords.iter().map(|&(u, v)| nalgebra::Point2::new(u, v)).collect();
    py.detach(|| {
        let a = surface_distance_matrix_sampled(&mesh.0, metric, stride)?;
        let b = uv_distance_matrix_sampled(&coords, stride)?;
        Ok((core_atlas::similarity_s1(&a, &b)?, core_atlas::similarity_s2(&a, &b)?))
    })
    .py()
}

/// Row-major all-pairs graph distances over every `stride`-th vertex.
#[pyfunction]
#[pyo3(signature = (mesh, metric="edge", stride=1))]
fn surface_distances(mesh: &PyMesh, metric: &str, stride: usize) -> PyResult<Vec<f64>> {
    let metric = self::metric(metric)?;
    surface_distance_matrix_sampled(&mesh.0, metric, stride).py().map(|d| d.values().to_vec())
}

#[pyfunction]
fn encode_location_map(mesh: &PyMesh, atlas: &PyAtlas, height: usize, width: usize) -> PyResult<PyLocationMap> {
    codec::encode_location_map(&mesh.0, &atlas.0, height, width).py().map(PyLocationMap)
}

#[pyfunction]
fn decode_vertices(map: &PyLocationMap, atlas: &PyAtlas) -> PyResult<Vec<P3>> {
    codec::decode_vertices(&map.0, &atlas.0).py().map(|v| to_p3(&v))
}

/// `camera` is `(s, tx, ty)`.
#[pyfunction]
fn render_iuv(mesh: &PyMesh, atlas: &PyAtlas, camera: P3, height: usize, width: usize) -> PyResult<PyIuvImage> {
    codec::render_iuv(&mesh.0, &atlas.0, &self::camera(camera)?, height, width).py().map(PyIuvImage)
}

/// Flat row-major weight grid.
#[pyfunction]
fn weight_map(mesh: &PyMesh, atlas: &PyAtlas, seeds: Vec<usize>, alpha: f64, height: usize, width: usize) -> PyResult<Vec<f64>> {
    codec::weight_map(&mesh.0, &atlas.0, &seeds, alpha, height, width).py().map(|g| g.data().to_vec())
}

#[pyfunction]
#[pyo3(signature = (map, iuv, camera, reduction="mean"))]
fn loss_consistent(map: &PyLocationMap, iuv: &PyIuvImage, camera: P3, reduction: &str) -> PyResult<f64> {
    measures::loss_consistent(&map.0, &iuv.0, &self::camera(camera)?, self::reduction(reduction)?).py()
}

#[pyfunction]
fn surface_error(pred: Vec<P3>, gt: Vec<P3>) -> PyResult<f64> {
    measures::surface_error(&from_p3(&pred), &from_p3(&gt)).py()
}

#[pyfunction]
#[pyo3(signature = (pred, gt, procrustes=false))]
fn mpjpe(pred: Vec<P3>, gt: Vec<P3>, procrustes: bool) -> PyResult<f64> {
    let pred = Joints3::new(from_p3(&pred)).py()?;
    let gt = Joints3::new(from_p3(&gt)).py()?;
    let alignment = if procrustes { Alignment::Procrustes } else { Alignment::None };
    measures::mpjpe(&pred, &gt, alignment).py()
}

/// `(aligned, scale, rotation rows, translation)`.
#[pyfunction]
fn procrustes_align(pred: Vec<P3>, gt: Vec<P3>) -> PyResult<Aligned> {
    let (aligned, sim) = measures::procrustes_align(&from_p3(&pred), &from_p3(&gt)).py()?;
    let m = sim.rotation.matrix();
    let rows = [0, 1, 2].map(|r| [m[(r, 0)], m[(r, 1)], m[(r, 2)]]);
    let t = sim.translation;
    Ok((to_p3(&aligned), sim.scale, rows, (t.x, t.y, t.z)))
}

#[pymodule]
#[pyo3(name = "uvkit")]
fn uvkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyAtlas>()?;
    m.add_class::<PyLocationMap>()?;
    m.add_class::<PyIuvImage>()?;
    m.add_function(wrap_pyfunction!(load_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(load_atlas, m)?)?;
    m.add_function(wrap_pyfunction!(load_seam, m)?)?;
    m.add_function(wrap_pyfunction!(load_symmetry, m)?)?;
    m.add_function(wrap_pyfunction!(load_vertex_list, m)?)?;
    m.add_function(wrap_pyfunction!(save_obj, m)?)?;
    m.add_function(wrap_pyfunction!(build_continuous_atlas, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(surface_distances, m)?)?;
    m.add_function(wrap_pyfunction!(encode_location_map, m)?)?;
    m.add_function(wrap_pyfunction!(decode_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(render_iuv, m)?)?;
    m.add_function(wrap_pyfunction!(weight_map, m)?)?;
    m.add_function(wrap_pyfunction!(loss_consistent, m)?)?;
    m.add_function(wrap_pyfunction!(surface_error, m)?)?;
    m.add_function(wrap_pyfunction!(mpjpe, m)?)?;
    m.add_function(wrap_pyfunction!(procrustes_align, m)?)?;
    Ok(())
}
