//! JSON file formats for spaces, molecules, and norm certificates.
//!
//! Writers emit floating-point numbers with 17 significant digits, which
//! round-trips every f64 exactly.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molecule::Molecule;
use crate::norm::NormCertificate;
use crate::space::PMetricSpace;

/// On-disk space: `{"p": .., "labels": [..], "base": 0, "dist": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub p: f64,
    pub labels: Vec<String>,
    pub base: usize,
    pub dist: Vec<Vec<f64>>,
}

impl SpaceFile {
    pub fn from_space(space: &PMetricSpace) -> Self {
        SpaceFile {
            p: space.p(),
            labels: space.labels().to_vec(),
            base: 0,
            dist: space.matrix().to_vec(),
        }
    }

    pub fn into_space(self) -> Result<PMetricSpace> {
        if self.base != 0 {
            return Err(Error::structural(
                "spaces are canonicalized with base index 0",
            ));
        }
        PMetricSpace::new(self.labels, self.dist, self.p)
    }
}

/// On-disk molecule: the space inline or as a path relative to the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoleculeFile {
    pub space: SpaceRef,
    pub coeffs: Vec<f64>,
}

/// Certificate output schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub value: f64,
    pub upper: f64,
    pub lower: f64,
    pub primal: Vec<PrimalTermFile>,
    pub dual: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimalTermFile {
    pub x: usize,
    pub y: usize,
    pub lambda: f64,
}

impl CertificateFile {
    pub fn from_certificate(cert: &NormCertificate) -> Self {
        CertificateFile {
            value: cert.value,
            upper: cert.upper,
            lower: cert.lower,
            primal: cert
                .primal
                .iter()
                .map(|t| PrimalTermFile {
                    x: t.x,
                    y: t.y,
                    lambda: t.lambda,
                })
                .collect(),
            dual: cert.dual.values().to_vec(),
        }
    }
}

/// serde_json formatter printing floats with 17 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Serializes with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_space(path: &Path, space: &PMetricSpace) -> Result<()> {
    std::fs::write(path, to_json_string(&SpaceFile::from_space(space))?)?;
    Ok(())
}

pub fn read_space(path: &Path) -> Result<PMetricSpace> {
    let text = std::fs::read_to_string(path)?;
    let file: SpaceFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.into_space()
}

pub fn write_molecule(path: &Path, molecule: &Molecule) -> Result<()> {
    let file = MoleculeFile {
        space: SpaceRef::Inline(SpaceFile::from_space(molecule.space())),
        coeffs: molecule.coeffs().to_vec(),
    };
    std::fs::write(path, to_json_string(&file)?)?;
    Ok(())
}

/// Reads a molecule; a space path inside the file resolves relative to the
/// molecule file's directory.
pub fn read_molecule(path: &Path) -> Result<Molecule> {
    let text = std::fs::read_to_string(path)?;
    let file: MoleculeFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let space = match file.space {
        SpaceRef::Inline(sf) => sf.into_space()?,
        SpaceRef::Path(rel) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            read_space(&base.join(rel))?
        }
    };
    Molecule::new(Arc::new(space), file.coeffs)
}

/// Formats a float with 17 significant digits for CSV rows.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_grid, GridKind};

    #[test]
    fn space_roundtrip_is_exact() {
        let dir = std::env::temp_dir().join("lipfree-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = make_grid(GridKind::Custom(vec![0.0, 1.0 / 3.0, 1.0]), 0.5).unwrap();
        let path = dir.join("space.json");
        write_space(&path, &g.space).unwrap();
        let back = read_space(&path).unwrap();
        assert_eq!(back.matrix(), g.space.matrix());
        assert_eq!(back.p(), g.space.p());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
    }

    #[test]
    fn molecule_roundtrip_with_inline_space() {
        let dir = std::env::temp_dir().join("lipfree-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = make_grid(GridKind::IntegerSegment(3), 1.0).unwrap();
        let m = Molecule::new(g.space.clone(), vec![-0.75, 0.25, 0.25, 0.25]).unwrap();
        let path = dir.join("molecule.json");
        write_molecule(&path, &m).unwrap();
        let back = read_molecule(&path).unwrap();
        assert_eq!(back.coeffs(), m.coeffs());
    }

    #[test]
    fn molecule_with_space_path() {
        let dir = std::env::temp_dir().join("lipfree-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = make_grid(GridKind::IntegerSegment(2), 1.0).unwrap();
        write_space(&dir.join("s.json"), &g.space).unwrap();
        std::fs::write(
            dir.join("m.json"),
            r#"{"space": "s.json", "coeffs": [-1.0, 0.0, 1.0]}"#,
        )
        .unwrap();
        let m = read_molecule(&dir.join("m.json")).unwrap();
        assert_eq!(m.coeffs(), &[-1.0, 0.0, 1.0]);
        assert_eq!(m.space().n(), 3);
    }

    #[test]
    fn invalid_space_file_is_a_validation_error() {
        let dir = std::env::temp_dir().join("lipfree-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(
            &path,
            r#"{"p": 1.0, "labels": ["0","1","2"], "base": 0,
               "dist": [[0,1,3],[1,0,1],[3,1,0]]}"#,
        )
        .unwrap();
        assert!(matches!(read_space(&path), Err(Error::Structural(_))));
    }
}
