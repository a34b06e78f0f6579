//! Datasets, IDX files, PGM image grids and model files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::metrics::format_real;
use crate::nn::{Activation, DenseLayer, FfaModel};
use crate::tensor::Matrix;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

pub const MODEL_MAGIC: &[u8; 4] = b"FFAM";
pub const MODEL_VERSION: u8 = 1;

/// Observations as rows plus optional integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Option<Vec<u32>>,
    /// Set once features have been scaled into `[0, 1]`.
    pub normalized: bool,
    /// Where the data came from, for reports and manifests.
    pub source: String,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Option<Vec<u32>>, source: impl Into<String>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != features.rows() {
                return Err(Error::Consistency(format!(
                    "{} labels for {} observations",
                    l.len(),
                    features.rows()
                )));
            }
        }
        Ok(Dataset {
            features,
            labels,
            normalized: false,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }

    pub fn width(&self) -> usize {
        self.features.cols()
    }

    /// Rows `indices` in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            normalized: self.normalized,
            source: self.source.clone(),
        }
    }

    /// The first `n` rows after a seeded shuffle (all rows if `n` exceeds
    /// the dataset size).
    pub fn subsample(&self, n: usize, seed: u64) -> Dataset {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        order.truncate(n);
        let mut out = self.select(&order);
        out.source = format!("{} (subsample {n}, seed {seed})", self.source);
        out
    }

    pub fn labels_or_err(&self) -> Result<&[u32]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::Consistency(format!("dataset {} has no labels", self.source)))
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or_else(|| Error::format(path, format!("header truncated at byte {offset}")))
}

/// Parses an IDX image file into an `(count, rows · cols)` matrix of byte
/// values. Returns the matrix and the image shape.
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<(Matrix, (usize, usize))> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::format(
            path,
            format!("expected image magic 0x{IDX_IMAGES_MAGIC:08x}, found 0x{magic:08x}"),
        ));
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let rows = be_u32(bytes, 8, path)? as usize;
    let cols = be_u32(bytes, 12, path)? as usize;
    let pixels = rows * cols;
    let payload = &bytes[16..];
    if payload.len() != count * pixels {
        return Err(Error::format(
            path,
            format!(
                "header announces {count} images of {rows}x{cols} ({} bytes), payload has {} bytes",
                count * pixels,
                payload.len()
            ),
        ));
    }
    let data = payload.iter().map(|&b| f64::from(b)).collect();
    Ok((Matrix::new(count, pixels, data)?, (rows, cols)))
}

pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<Vec<u32>> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::format(
            path,
            format!("expected label magic 0x{IDX_LABELS_MAGIC:08x}, found 0x{magic:08x}"),
        ));
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let payload = &bytes[8..];
    if payload.len() != count {
        return Err(Error::format(
            path,
            format!("header announces {count} labels, payload has {} bytes", payload.len()),
        ));
    }
    Ok(payload.iter().map(|&b| u32::from(b)).collect())
}

/// Reads an IDX image file and, optionally, its label file. Features keep
/// their byte values; see [`normalize_01`].
pub fn read_idx(images: &Path, labels: Option<&Path>) -> Result<Dataset> {
    let (features, _) = parse_idx_images(&read_bytes(images)?, images)?;
    let labels = match labels {
        Some(p) => Some(parse_idx_labels(&read_bytes(p)?, p)?),
        None => None,
    };
    Dataset::new(features, labels, images.display().to_string())
}

fn feature_bytes(dataset: &Dataset) -> Result<Vec<u8>> {
    dataset
        .features
        .data()
        .iter()
        .map(|&v| {
            let byte = if dataset.normalized { (v * 255.0).round() } else { v };
            if byte.fract() == 0.0 && (0.0..=255.0).contains(&byte) {
                Ok(byte as u8)
            } else {
                Err(Error::Range(format!("feature value {v} is not representable as a byte")))
            }
        })
        .collect()
}

/// Encodes features as an IDX image file of `image_shape` images.
pub fn encode_idx_images(dataset: &Dataset, image_shape: (usize, usize)) -> Result<Vec<u8>> {
    let (h, w) = image_shape;
    if h * w != dataset.width() {
        return Err(Error::dimension("encode_idx_images", (dataset.len(), dataset.width()), (h, w)));
    }
    let mut out = Vec::with_capacity(16 + dataset.features.data().len());
    for v in [IDX_IMAGES_MAGIC, dataset.len() as u32, h as u32, w as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend(feature_bytes(dataset)?);
    Ok(out)
}

pub fn encode_idx_labels(labels: &[u32]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    for &l in labels {
        out.push(u8::try_from(l).map_err(|_| Error::Range(format!("label {l} does not fit in a byte")))?);
    }
    Ok(out)
}

/// Writes the dataset as IDX files. Normalized features are scaled back to
/// bytes with rounding.
pub fn write_idx(dataset: &Dataset, image_shape: (usize, usize), images: &Path, labels: Option<&Path>) -> Result<()> {
    write_bytes(images, &encode_idx_images(dataset, image_shape)?)?;
    if let Some(path) = labels {
        write_bytes(path, &encode_idx_labels(dataset.labels_or_err()?)?)?;
    }
    Ok(())
}

/// Divides every feature by 255. A dataset that is already normalized is
/// returned unchanged.
pub fn normalize_01(mut dataset: Dataset) -> Dataset {
    if dataset.normalized {
        log::warn!("dataset {} is already normalized; leaving it unchanged", dataset.source);
        return dataset;
    }
    dataset.features.data_mut().iter_mut().for_each(|v| *v /= 255.0);
    dataset.normalized = true;
    dataset
}

/// Appends `row` (with `label`, if the dataset is labelled) and returns the
/// extended dataset and the index of the new row.
pub fn inject(dataset: &Dataset, row: &[f64], label: Option<u32>) -> Result<(Dataset, usize)> {
    if row.len() != dataset.width() {
        return Err(Error::dimension("inject", (1, row.len()), (dataset.len(), dataset.width())));
    }
    let index = dataset.len();
    let features = dataset.features.vstack(&Matrix::row_vector(row.to_vec()))?;
    let labels = match (&dataset.labels, label) {
        (Some(l), Some(new)) => Some(l.iter().copied().chain([new]).collect()),
        (Some(_), None) => {
            return Err(Error::Consistency("labelled dataset needs a label for the injected row".into()))
        }
        (None, _) => None,
    };
    Ok((
        Dataset {
            features,
            labels,
            normalized: dataset.normalized,
            source: format!("{} + injected row {index}", dataset.source),
        },
        index,
    ))
}

/// Gray level for a value in `[0, 1]`, rounding halves up.
pub fn gray_level(v: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Range(format!("pixel value {v} outside [0, 1]")));
    }
    Ok((255.0 * v + 0.5).floor() as u8)
}

/// Tiles each row of `rows` as a `cell_h × cell_w` image, left to right and
/// top to bottom, `grid_cols` images per grid row. Unused cells are black.
pub fn encode_pgm_grid(rows: &Matrix, grid_cols: usize, cell_h: usize, cell_w: usize) -> Result<Vec<u8>> {
    if grid_cols == 0 || cell_h == 0 || cell_w == 0 {
        return Err(Error::Config("grid and cell dimensions must be positive".into()));
    }
    if rows.cols() != cell_h * cell_w {
        return Err(Error::dimension("encode_pgm_grid", rows.shape(), (cell_h, cell_w)));
    }
    if rows.rows() == 0 {
        return Err(Error::EmptyInput("no images to tile".into()));
    }
    let grid_rows = rows.rows().div_ceil(grid_cols);
    let (width, height) = (grid_cols * cell_w, grid_rows * cell_h);
    let mut pixels = vec![0u8; width * height];
    for (k, image) in rows.iter_rows().enumerate() {
        let (gy, gx) = (k / grid_cols, k % grid_cols);
        for y in 0..cell_h {
            let start = (gy * cell_h + y) * width + gx * cell_w;
            for x in 0..cell_w {
                pixels[start + x] = gray_level(image[y * cell_w + x])?;
            }
        }
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(pixels);
    Ok(out)
}

pub fn write_pgm_grid(rows: &Matrix, grid_cols: usize, cell_h: usize, cell_w: usize, path: &Path) -> Result<()> {
    write_bytes(path, &encode_pgm_grid(rows, grid_cols, cell_h, cell_w)?)
}

/// Binary model encoding, all integers and reals little-endian:
///
/// ```text
/// "FFAM" | version u8 | tied u8 | bottleneck u32 | count u32 | sizes u32 × count
///        | activation u8 × (count − 1) | per layer: weights f64 (row-major), bias f64
///        | crc32 of everything before u32
/// ```
pub fn encode_model(model: &FfaModel) -> Vec<u8> {
    let sizes = model.layer_sizes();
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.push(MODEL_VERSION);
    out.push(u8::from(model.is_tied()));
    out.extend_from_slice(&(model.bottleneck_index() as u32).to_le_bytes());
    out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for s in &sizes {
        out.extend_from_slice(&(*s as u32).to_le_bytes());
    }
    out.extend(model.activations().iter().map(|a| a.code()));
    for layer in model.layers() {
        for v in layer.weights.data().iter().chain(layer.bias.data()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| Error::Corruption {
            path: self.path.into(),
            reason: format!("truncated at byte {}", self.pos),
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn reals(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| self.corrupt("payload size overflows"))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn corrupt(&self, reason: impl Into<String>) -> Error {
        Error::Corruption {
            path: self.path.into(),
            reason: reason.into(),
        }
    }
}

/// Inverse of [`encode_model`]. The version is checked before the checksum
/// so files from other format versions are reported as such.
pub fn decode_model(bytes: &[u8], path: &Path) -> Result<FfaModel> {
    if bytes.len() < 6 || &bytes[..4] != MODEL_MAGIC {
        return Err(Error::format(path, "not a model file (missing FFAM magic)"));
    }
    if bytes[4] != MODEL_VERSION {
        return Err(Error::Version {
            found: bytes[4],
            expected: MODEL_VERSION,
        });
    }
    let corrupt = |reason: String| Error::Corruption {
        path: path.into(),
        reason,
    };
    if bytes.len() < 4 + 6 {
        return Err(corrupt("file too short for a checksum".into()));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().expect("4 bytes"));
    let actual = crc32fast::hash(body);
    if stored != actual {
        return Err(corrupt(format!("checksum mismatch: stored {stored:08x}, computed {actual:08x}")));
    }

    let mut r = Reader { bytes: body, pos: 5, path };
    let tied = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(r.corrupt(format!("tied flag {other}"))),
    };
    let bottleneck = r.u32()? as usize;
    let count = r.u32()? as usize;
    if count < 2 || count > body.len() {
        return Err(r.corrupt(format!("implausible layer count {count}")));
    }
    let sizes = (0..count).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let activations = (0..count - 1)
        .map(|_| {
            let code = r.u8()?;
            Activation::from_code(code).ok_or_else(|| r.corrupt(format!("unknown activation code {code}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut layers = Vec::with_capacity(count - 1);
    for (k, activation) in activations.into_iter().enumerate() {
        let (fan_in, fan_out) = (sizes[k], sizes[k + 1]);
        let weights = Matrix::new(fan_in, fan_out, r.reals(fan_in * fan_out)?)?;
        let bias = Matrix::new(1, fan_out, r.reals(fan_out)?)?;
        layers.push(DenseLayer::new(weights, bias, activation)?);
    }
    if r.pos != body.len() {
        return Err(r.corrupt(format!("{} trailing bytes", body.len() - r.pos)));
    }
    let mut model = FfaModel::new(layers, bottleneck).map_err(|e| corrupt(e.to_string()))?;
    if tied {
        let l = model.layers().len();
        let consistent = model.is_symmetric()
            && (0..l / 2).all(|k| model.layers()[l - 1 - k].weights == model.layers()[k].weights.transpose());
        if !consistent {
            return Err(corrupt("tied flag set but decoder weights are not encoder transposes".into()));
        }
        model.set_tied_flag(true);
    }
    Ok(model)
}

pub fn save_model(model: &FfaModel, path: &Path) -> Result<()> {
    write_bytes(path, &encode_model(model))
}

pub fn load_model(path: &Path) -> Result<FfaModel> {
    decode_model(&read_bytes(path)?, path)
}

/// Human-readable dump with 17 significant digits per parameter.
pub fn export_model_text(model: &FfaModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sizes {:?}", model.layer_sizes());
    let _ = writeln!(out, "bottleneck {}", model.bottleneck_index());
    let _ = writeln!(out, "tied {}", model.is_tied());
    for (k, layer) in model.layers().iter().enumerate() {
        let _ = writeln!(out, "layer {k} {} {}x{}", layer.activation, layer.in_dim(), layer.out_dim());
        for row in layer.weights.iter_rows() {
            let line: Vec<String> = row.iter().map(|&v| format_real(v)).collect();
            let _ = writeln!(out, "w {}", line.join(" "));
        }
        let line: Vec<String> = layer.bias.data().iter().map(|&v| format_real(v)).collect();
        let _ = writeln!(out, "b {}", line.join(" "));
    }
    out
}

/// Isotropic Gaussian blobs of standard deviation `sigma`, `count_per_cluster`
/// points each, labelled by cluster index in generation order.
pub fn synth_clusters(centers: &[Vec<f64>], sigma: f64, count_per_cluster: usize, seed: u64) -> Result<Dataset> {
    let Some(first) = centers.first() else {
        return Err(Error::EmptyInput("no cluster centers".into()));
    };
    let dim = first.len();
    if centers.iter().any(|c| c.len() != dim) {
        return Err(Error::Consistency("cluster centers differ in dimension".into()));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Config(format!("sigma must be >= 0, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(centers.len() * count_per_cluster * dim);
    let mut labels = Vec::with_capacity(centers.len() * count_per_cluster);
    for (label, center) in centers.iter().enumerate() {
        for _ in 0..count_per_cluster {
            data.extend(center.iter().map(|&c| {
                let z: f64 = StandardNormal.sample(&mut rng);
                c + sigma * z
            }));
            labels.push(label as u32);
        }
    }
    Dataset::new(
        Matrix::new(labels.len(), dim, data)?,
        Some(labels),
        format!("synthetic clusters (sigma {sigma}, seed {seed})"),
    )
}
