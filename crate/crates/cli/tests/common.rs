//! Helpers for driving the `uvkit` binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

pub fn assets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/assets")
}

pub fn asset(name: &str) -> PathBuf {
    assets().join(name)
}

pub fn uvkit(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_uvkit"));
    cmd.args(args).env_remove("UVT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn uvkit")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// The humanoid's continuous atlas written by `uvkit param`, built once per
/// test binary: `(dir, atlas.obj)`.
pub fn humanoid_atlas() -> &'static (PathBuf, PathBuf) {
    static CELL: OnceLock<(PathBuf, PathBuf)> = OnceLock::new();
    CELL.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap().keep();
        let obj = dir.join("atlas.obj");
        let out = uvkit(
            &[
                "param",
                "--mesh", p(&asset("humanoid.obj")),
                "--seam", p(&asset("humanoid.seam")),
                "--symmetry", p(&asset("humanoid.sym")),
                "--out", p(&obj),
                "--json", p(&dir.join("param.json")),
            ],
            &[],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        (dir, obj)
    })
}

/// Manifest over the humanoid atlas with the given `(name, mesh)` samples.
pub fn write_manifest(dir: &Path, samples: &[(&str, PathBuf)]) -> PathBuf {
    let (_, atlas) = humanoid_atlas();
    let samples: Vec<Value> = samples
        .iter()
        .map(|(name, mesh)| serde_json::json!({ "name": name, "mesh": mesh, "camera": [120.0, 128.0, 20.0] }))
        .collect();
    let manifest = serde_json::json!({
        "config": {
            "atlas": atlas,
            "uv_resolution": 128,
            "image_resolution": 256,
            "alpha": 2.0,
            "seeds": asset("humanoid.seeds"),
        },
        "samples": samples,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}
