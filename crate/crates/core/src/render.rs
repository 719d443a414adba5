//! Binary PPM (P6) rendering of a scalar field on a log scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorMap {
    #[default]
    Viridis,
    Gray,
}

impl std::str::FromStr for ColorMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "viridis" => Ok(ColorMap::Viridis),
            "gray" => Ok(ColorMap::Gray),
            _ => Err(Error::InvalidParameter(format!("unknown colormap {s:?} (viridis, gray)"))),
        }
    }
}

const VIRIDIS_ANCHORS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

/// The 256-entry table of `map`.
pub fn color_table(map: ColorMap) -> [[u8; 3]; 256] {
    let mut t = [[0u8; 3]; 256];
    for (i, c) in t.iter_mut().enumerate() {
        *c = match map {
            ColorMap::Gray => [i as u8; 3],
            ColorMap::Viridis => {
                // integer interpolation keeps the table exact on every platform
                let pos = i * (VIRIDIS_ANCHORS.len() - 1);
                let (k, r) = (pos / 255, pos % 255);
                let a = VIRIDIS_ANCHORS[k];
                let b = VIRIDIS_ANCHORS[(k + 1).min(VIRIDIS_ANCHORS.len() - 1)];
                std::array::from_fn(|ch| ((a[ch] as usize * (255 - r) + b[ch] as usize * r + 127) / 255) as u8)
            }
        };
    }
    t
}

/// Table indices of `log10(max(v, floor))`, spread over the field's range.
/// Row-major input with x fastest; a constant field maps to index 0.
pub fn color_indices(values: &[f64], floor: f64) -> Result<Vec<u8>> {
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!("render floor must be positive, got {floor}")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("cannot render a field with NaN values".into()));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.max(floor).log10()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !span.is_finite() {
        return Err(Error::InvalidParameter("cannot render a field with infinite values".into()));
    }
    Ok(logs.iter().map(|l| if span > 0.0 { ((l - lo) / span * 255.0).round() as u8 } else { 0 }).collect())
}

/// P6 image with one pixel per cell; the top image row is the largest `y`.
pub fn render_ppm(values: &[f64], nx: usize, ny: usize, floor: f64, map: ColorMap) -> Result<Vec<u8>> {
    if values.len() != nx * ny {
        return Err(Error::DimensionMismatch(format!("{} values for a {nx}x{ny} image", values.len())));
    }
    let idx = color_indices(values, floor)?;
    let table = color_table(map);
    let header = format!("P6\n{nx} {ny}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * nx * ny);
    out.extend_from_slice(header.as_bytes());
    for j in (0..ny).rev() {
        for &k in &idx[j * nx..(j + 1) * nx] {
            out.extend_from_slice(&table[k as usize]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_span_their_anchors() {
        let v = color_table(ColorMap::Viridis);
        assert_eq!(v[0], VIRIDIS_ANCHORS[0]);
        assert_eq!(v[255], VIRIDIS_ANCHORS[8]);
        assert_eq!(color_table(ColorMap::Gray)[77], [77; 3]);
    }

    #[test]
    fn uniform_field_is_one_color() {
        let img = render_ppm(&[2.0; 12], 4, 3, 1e-3, ColorMap::Viridis).unwrap();
        let header = b"P6\n4 3\n255\n";
        assert_eq!(&img[..header.len()], header);
        let body = &img[header.len()..];
        assert_eq!(body.len(), 36);
        assert!(body.chunks(3).all(|p| p == VIRIDIS_ANCHORS[0]));
    }

    #[test]
    fn top_row_is_largest_y() {
        // row 0 (bottom) small, row 1 (top) large
        let img = render_ppm(&[1.0, 1.0, 100.0, 100.0], 2, 2, 1e-3, ColorMap::Gray).unwrap();
        let body = &img[b"P6\n2 2\n255\n".len()..];
        assert_eq!(&body[..3], &[255; 3]);
        assert_eq!(&body[9..], &[0; 3]);
    }

    #[test]
    fn floor_clamps_and_nan_fails() {
        let idx = color_indices(&[0.0, -5.0, 1e-3, 1.0], 1e-3).unwrap();
        assert_eq!(idx, vec![0, 0, 0, 255]);
        assert!(color_indices(&[f64::NAN], 1e-3).is_err());
        assert!(render_ppm(&[1.0; 3], 2, 2, 1e-3, ColorMap::Gray).is_err());
    }
}
