//! Bundled spectral data and CSV ingestion.
//!
//! All fixture CSVs share one layout: a header row, a leading wavelength
//! column in nanometers, and one column per curve. Camera databases use one
//! row per camera instead (name followed by R, G, B curves). Everything is
//! linearly resampled onto the canonical 400-720 nm grid at load time.
//!
//! The bundled chart and rendering-sample reflectances are smooth spectral
//! reconstructions fitted to published colorimetry (see `scripts/`), not
//! measurements; the loaders accept measured data in the same layout.

use std::path::Path;
use std::sync::OnceLock;

use crate::colorimetry::{LabColor, ObserverSensitivity};
use crate::error::{Error, Result};
use crate::grid::{Spectrum, WavelengthGrid, CANONICAL_GRID};
use crate::scene::{CameraSet, LedBank, ReflectanceSet};

const CMF_CSV: &str = include_str!("../data/cie1931_cmf.csv");
const D65_CSV: &str = include_str!("../data/d65.csv");
const COLORCHECKER_CSV: &str = include_str!("../data/colorchecker.csv");
const CRI_SAMPLES_CSV: &str = include_str!("../data/cri_samples.csv");
const LED_BANK_CSV: &str = include_str!("../data/led_bank.csv");
const CAMERAS_CSV: &str = include_str!("../data/cameras_synthetic.csv");
const CIEDE2000_PAIRS_CSV: &str = include_str!("../data/ciede2000_pairs.csv");

/// One published CIEDE2000 verification case.
#[derive(Debug, Clone, Copy)]
pub struct VerificationPair {
    pub first: LabColor,
    pub second: LabColor,
    pub expected: f64,
}

/// A parsed wavelength-indexed table: column labels plus one curve per column.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    pub grid: WavelengthGrid,
    pub labels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl SpectralTable {
    /// Parses wavelength-first CSV text and resamples onto `target`.
    pub fn parse(text: &str, source_name: &str, target: WavelengthGrid) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let err = |message: String| Error::FixtureParse {
            file: source_name.to_string(),
            message,
        };

        let headers = reader
            .headers()
            .map_err(|e| err(e.to_string()))?
            .clone();
        if headers.len() < 2 {
            return Err(err("need a wavelength column plus at least one value column".into()));
        }
        let labels: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();

        let mut wavelengths = Vec::new();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
        for record in reader.records() {
            let record = record.map_err(|e| err(e.to_string()))?;
            if record.len() != labels.len() + 1 {
                return Err(err(format!(
                    "row has {} fields, expected {}",
                    record.len(),
                    labels.len() + 1
                )));
            }
            let wl: f64 = record[0]
                .parse()
                .map_err(|_| err(format!("bad wavelength '{}'", &record[0])))?;
            wavelengths.push(wl);
            for (i, field) in record.iter().skip(1).enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| err(format!("bad value '{field}'")))?;
                columns[i].push(v);
            }
        }
        if wavelengths.len() < 2 {
            return Err(err("need at least two wavelength rows".into()));
        }
        let step = wavelengths[1] - wavelengths[0];
        for w in wavelengths.windows(2) {
            if (w[1] - w[0] - step).abs() > 1e-6 {
                return Err(err("wavelength column must be evenly spaced".into()));
            }
        }
        let source = WavelengthGrid::new(wavelengths[0], step, wavelengths.len())?;
        let columns = columns
            .into_iter()
            .map(|col| crate::grid::resample_values(&source, &col, &target))
            .collect();
        Ok(Self {
            grid: target,
            labels,
            columns,
        })
    }

    pub fn read_path(path: &Path, target: WavelengthGrid) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string(), target)
    }
}

fn table_to_reflectance(table: SpectralTable) -> Result<ReflectanceSet> {
    let patches = table
        .columns
        .iter()
        .map(|col| Spectrum::new(table.grid, col.clone()))
        .collect::<Result<Vec<_>>>()?;
    ReflectanceSet::new(table.grid, patches, table.labels)
}

/// CIE 1931 2-degree color matching functions on the canonical grid.
pub fn cie_1931_cmf() -> ObserverSensitivity {
    static CACHE: OnceLock<ObserverSensitivity> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let t = SpectralTable::parse(CMF_CSV, "cie1931_cmf.csv", CANONICAL_GRID)
                .expect("bundled CMF table");
            ObserverSensitivity::new(
                t.grid,
                [t.columns[0].clone(), t.columns[1].clone(), t.columns[2].clone()],
                "cie1931_2deg".into(),
            )
            .expect("bundled CMF table")
        })
        .clone()
}

/// Standard daylight illuminant D65 on the canonical grid (table scale).
pub fn d65() -> Spectrum {
    static CACHE: OnceLock<Spectrum> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let t = SpectralTable::parse(D65_CSV, "d65.csv", CANONICAL_GRID)
                .expect("bundled D65 table");
            Spectrum::new(t.grid, t.columns[0].clone()).expect("bundled D65 table")
        })
        .clone()
}

/// The bundled 24-patch chart reflectances.
pub fn colorchecker() -> ReflectanceSet {
    static CACHE: OnceLock<ReflectanceSet> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            table_to_reflectance(
                SpectralTable::parse(COLORCHECKER_CSV, "colorchecker.csv", CANONICAL_GRID)
                    .expect("bundled chart table"),
            )
            .expect("bundled chart table")
        })
        .clone()
}

/// The eight bundled rendering-check samples.
pub fn cri_samples() -> ReflectanceSet {
    static CACHE: OnceLock<ReflectanceSet> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            table_to_reflectance(
                SpectralTable::parse(CRI_SAMPLES_CSV, "cri_samples.csv", CANONICAL_GRID)
                    .expect("bundled sample table"),
            )
            .expect("bundled sample table")
        })
        .clone()
}

/// The first eight chromatic chart patches, usable as a non-standard
/// substitute sample set for rendering checks.
pub fn colorchecker_chromatic_8() -> ReflectanceSet {
    colorchecker()
        .subset(&[0, 1, 2, 3, 4, 5, 6, 7])
        .expect("bundled chart has 24 patches")
}

/// The default ten-emitter Gaussian bank (405-660 nm, 20 nm FWHM).
pub fn led_bank() -> LedBank {
    static CACHE: OnceLock<LedBank> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let t = SpectralTable::parse(LED_BANK_CSV, "led_bank.csv", CANONICAL_GRID)
                .expect("bundled LED table");
            let profiles = t
                .columns
                .iter()
                .map(|col| Spectrum::new(t.grid, col.clone()).expect("bundled LED table"))
                .collect();
            LedBank::new(t.grid, profiles, t.labels).expect("bundled LED table")
        })
        .clone()
}

/// All four bundled synthetic cameras.
pub fn synthetic_cameras() -> CameraSet {
    static CACHE: OnceLock<CameraSet> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            parse_camera_db(CAMERAS_CSV, "cameras_synthetic.csv", CANONICAL_GRID)
                .expect("bundled camera table")
        })
        .clone()
}

/// The three synthetic cameras used for optimization (synth_d stays held out
/// for cross-camera decoding checks).
pub fn synthetic_cameras_3() -> CameraSet {
    let all = synthetic_cameras();
    CameraSet::new(all.cameras.into_iter().take(3).collect()).expect("bundled camera table")
}

/// Published CIEDE2000 verification pairs.
pub fn ciede2000_verification_pairs() -> Vec<VerificationPair> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(CIEDE2000_PAIRS_CSV.as_bytes());
    reader
        .records()
        .map(|record| {
            let r = record.expect("bundled verification pairs");
            let v: Vec<f64> = r.iter().map(|f| f.parse().unwrap()).collect();
            VerificationPair {
                first: LabColor {
                    l: v[0],
                    a: v[1],
                    b: v[2],
                },
                second: LabColor {
                    l: v[3],
                    a: v[4],
                    b: v[5],
                },
                expected: v[6],
            }
        })
        .collect()
}

/// Parses a camera database: one row per camera, `camera` column followed by
/// R, G, B curves (3 x grid-count value columns).
pub fn parse_camera_db(text: &str, source_name: &str, target: WavelengthGrid) -> Result<CameraSet> {
    let err = |message: String| Error::FixtureParse {
        file: source_name.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    let n_values = headers.len() - 1;
    if n_values % 3 != 0 || n_values == 0 {
        return Err(err(format!(
            "camera rows need 3 equal-length channel blocks, got {n_values} value columns"
        )));
    }
    let per_channel = n_values / 3;

    // Channel wavelengths come from the header suffixes, e.g. r_400.
    let mut wavelengths = Vec::with_capacity(per_channel);
    for h in headers.iter().skip(1).take(per_channel) {
        let wl = h
            .rsplit('_')
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| err(format!("header '{h}' has no wavelength suffix")))?;
        wavelengths.push(wl);
    }
    let step = wavelengths[1] - wavelengths[0];
    let source = WavelengthGrid::new(wavelengths[0], step, per_channel)?;

    let mut cameras = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.to_string()))?;
        if record.len() != n_values + 1 {
            return Err(err(format!(
                "camera row has {} fields, expected {}",
                record.len(),
                n_values + 1
            )));
        }
        let label = record[0].to_string();
        let mut channels: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (i, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| err(format!("bad value '{field}' in camera '{label}'")))?;
            channels[i / per_channel].push(v);
        }
        let channels = [
            crate::grid::resample_values(&source, &channels[0], &target),
            crate::grid::resample_values(&source, &channels[1], &target),
            crate::grid::resample_values(&source, &channels[2], &target),
        ];
        cameras.push(ObserverSensitivity::new(target, channels, label)?);
    }
    CameraSet::new(cameras)
}

/// Loads a camera fixture from disk. A file parses as a camera database; a
/// directory loads every `.csv` inside as one wavelength-first camera file
/// (columns wavelength, r, g, b) labeled by file stem.
pub fn load_cameras(path: &Path, target: WavelengthGrid) -> Result<CameraSet> {
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "csv").unwrap_or(false))
            .collect();
        entries.sort();
        let mut cameras = Vec::new();
        for file in entries {
            let table = SpectralTable::read_path(&file, target)?;
            if table.columns.len() != 3 {
                return Err(Error::FixtureParse {
                    file: file.display().to_string(),
                    message: format!(
                        "per-camera files need exactly r,g,b columns, got {}",
                        table.columns.len()
                    ),
                });
            }
            let label = file
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "camera".into());
            cameras.push(ObserverSensitivity::new(
                target,
                [
                    table.columns[0].clone(),
                    table.columns[1].clone(),
                    table.columns[2].clone(),
                ],
                label,
            )?);
        }
        CameraSet::new(cameras)
    } else {
        let text = std::fs::read_to_string(path)?;
        parse_camera_db(&text, &path.display().to_string(), target)
    }
}

/// Loads a reflectance set (wavelength-first CSV) from disk.
pub fn load_reflectance(path: &Path, target: WavelengthGrid) -> Result<ReflectanceSet> {
    table_to_reflectance(SpectralTable::read_path(path, target)?)
}

/// Loads an LED bank (wavelength-first CSV, unit-peak columns) from disk.
pub fn load_led_bank(path: &Path, target: WavelengthGrid) -> Result<LedBank> {
    let t = SpectralTable::read_path(path, target)?;
    let profiles = t
        .columns
        .iter()
        .map(|col| Spectrum::new(t.grid, col.clone()))
        .collect::<Result<Vec<_>>>()?;
    LedBank::new(t.grid, profiles, t.labels)
}

/// Loads a single-column spectrum (wavelength-first CSV) from disk.
pub fn load_spectrum(path: &Path, target: WavelengthGrid) -> Result<Spectrum> {
    let t = SpectralTable::read_path(path, target)?;
    if t.columns.len() != 1 {
        return Err(Error::FixtureParse {
            file: path.display().to_string(),
            message: format!("expected one value column, got {}", t.columns.len()),
        });
    }
    Spectrum::new(t.grid, t.columns[0].clone())
}

/// Loads a 3-channel observer (wavelength-first CSV) from disk.
pub fn load_observer(path: &Path, target: WavelengthGrid, label: &str) -> Result<ObserverSensitivity> {
    let t = SpectralTable::read_path(path, target)?;
    if t.columns.len() != 3 {
        return Err(Error::FixtureParse {
            file: path.display().to_string(),
            message: format!("expected three value columns, got {}", t.columns.len()),
        });
    }
    ObserverSensitivity::new(
        target,
        [t.columns[0].clone(), t.columns[1].clone(), t.columns[2].clone()],
        label.to_string(),
    )
}
